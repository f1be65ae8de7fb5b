fn main() {
    eprintln!("scenario CLI not wired up yet");
    std::process::exit(2);
}
