fn main() {
    println!("regrasp cli placeholder");
}
