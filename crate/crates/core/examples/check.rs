use jetbounds::morse::compute_bound;
use std::time::Instant;

fn main() {
    for (n, k) in [(2usize, 2usize), (3, 3), (3, 5), (4, 4), (4, 5), (5, 5)] {
        let t = Instant::now();
        let cell = compute_bound(n, k).unwrap();
        println!("({n},{k}) -> {:?}  [{} ms]", cell.bound, t.elapsed().as_millis());
    }
}
