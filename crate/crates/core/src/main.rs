fn main() {
    std::process::exit(residue_sense::cli::run());
}
