use grouprep_core::{SignedGen, Word};
use grouprep_zigzag::{apply_braid_word, Composition};
use std::time::Instant;

fn main() {
    let alphabet = [SignedGen::gen(1), SignedGen::inv(1), SignedGen::gen(2), SignedGen::inv(2)];
    let mut frontier = vec![Word::empty()];
    for len in 1..=8 {
        let mut next = Vec::new();
        for w in &frontier {
            for &g in &alphabet {
                if w.symbols().last() == Some(&g.inverse()) {
                    continue;
                }
                let mut s = w.symbols().to_vec();
                s.push(g);
                next.push(Word::new(s));
            }
        }
        let t = Instant::now();
        let mut max = 0;
        let mut sum = 0.0;
        for w in &next {
            let jh = apply_braid_word(w, 3, 1, Composition::RightmostFirst).unwrap();
            max = max.max(*jh.counts.iter().max().unwrap());
            sum += jh.total() as f64;
        }
        println!("len {len}: {} words, max entry {max}, mean total {:.2}, {:?}", next.len(), sum / next.len() as f64, t.elapsed());
        frontier = next;
    }
}
