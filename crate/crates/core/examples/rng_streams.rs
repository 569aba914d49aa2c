//! The counter-based generator behind sampling: draw j of shot s depends
//! only on (seed, s, j).

use qir_toolkit::runtime::rng::ShotRng;

fn main() {
    for shot in 0..3 {
        let mut rng = ShotRng::new(42, shot);
        let draws: Vec<String> = (0..4).map(|_| format!("{:.6}", rng.next_f64())).collect();
        println!("shot {shot}: {}", draws.join(" "));
    }
}
