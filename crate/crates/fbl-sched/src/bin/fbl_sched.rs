fn main() {
    std::process::exit(fbl_sched::cli::run(std::env::args_os()));
}
