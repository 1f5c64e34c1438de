fn main() {
    std::process::exit(touch_alarm::cli::main());
}
