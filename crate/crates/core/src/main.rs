fn main() {
    std::process::exit(schema_xray::cli::main());
}
