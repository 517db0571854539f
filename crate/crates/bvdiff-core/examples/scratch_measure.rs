// scratch: exact wrong-key means under deeper peels + baseline degeneracy
use bvdiff_core::bits::{BitWord, TruncatedDifference};
use bvdiff_core::cipher::Cipher;

fn exact_mean_all_candidates(cipher: &Cipher, a: u64, b: u64) -> (f64, f64) {
    let bw = |v: u64| BitWord::of(v, 8);
    let r = cipher.rounds();
    let btd = TruncatedDifference::concrete(bw(b));
    let mut total_wrong = 0u64;
    let mut total_true = 0u64;
    for kv in 0..256u64 {
        let k = bw(kv);
        let true_rk = cipher.true_last_round_key(k).unwrap().bits();
        for pv in 0..256u64 {
            let x0 = bw(pv);
            let x1 = x0.xor(bw(a)).unwrap();
            let y0 = cipher.encrypt(x0, k).unwrap();
            let y1 = cipher.encrypt(x1, k).unwrap();
            for cand in 0..256u64 {
                let g = bw(cand);
                let m0 = cipher.invert_round(cipher.invert_round(y0, r, g).unwrap(), r-1, bw(0)).unwrap();
                let m1 = cipher.invert_round(cipher.invert_round(y1, r, g).unwrap(), r-1, bw(0)).unwrap();
                let hit = btd.matches(m0.xor(m1).unwrap()) as u64;
                if cand == true_rk { total_true += hit } else { total_wrong += hit }
            }
        }
    }
    (total_wrong as f64 / (256.0*256.0*255.0), total_true as f64 / (256.0*256.0))
}

fn main() {
    // Null differentials on full toy8 with a 2-round peel, t = r-2 = 2.
    for (a, b) in [(0x30u64, 0x03u64), (0xF0, 0xC3), (0x5A, 0xA5), (0x01, 0x8D)] {
        let c = Cipher::toy8(4);
        let (wm, tm) = exact_mean_all_candidates(&c, a, b);
        println!("toy8(4) t=2 null {a:#04x}->{b:#04x}: wrong rate {wm:.6} ({:.3}x 2^-8), true rate {tm:.4} ({:.3}x)", wm*256.0, tm*256.0);
    }
    // planted(4,2) criterion-7 instance for the ledger numbers.
    let c = Cipher::planted(4, 2);
    let (wm, tm) = exact_mean_all_candidates(&c, 0x30, 0x03);
    println!("planted(4,2) 0x30->0x03: wrong rate {wm:.6} ({:.3}x 2^-8), true {tm:.4}", wm*256.0);
    let _ = tm;

    // Exact randomperm baseline with and without degenerate quadruples.
    let c = Cipher::random_perm(4, 5);
    let bw = |v: u64| BitWord::of(v, 8);
    let (a1, s) = (bw(0x30), bw(0x03));
    let mut right_incl = 0u64;
    let mut right_excl = 0u64;
    let mut degenerate = 0u64;
    let mut total = 0u64;
    for kv in 0..256u64 {
        let k = bw(kv);
        for pv in 0..256u64 {
            let p0 = bw(pv);
            let p1 = p0.xor(a1).unwrap();
            let c0 = c.encrypt(p0, k).unwrap();
            let c1 = c.encrypt(p1, k).unwrap();
            let d0 = c0.xor(s).unwrap();
            let d1 = c1.xor(s).unwrap();
            let q0 = c.decrypt(d0, k).unwrap();
            let q1 = c.decrypt(d1, k).unwrap();
            let m = q0.xor(q1).unwrap() == a1;
            let deg = d0 == c1;
            total += 1;
            right_incl += m as u64;
            right_excl += (m && !deg) as u64;
            degenerate += deg as u64;
        }
    }
    println!("randomperm exact: incl {:.6} ({:.3}x 2^-8), excl-degenerate {:.6} ({:.3}x), degenerate rate {:.6}",
        right_incl as f64 / total as f64, right_incl as f64 / total as f64 * 256.0,
        right_excl as f64 / total as f64, right_excl as f64 / total as f64 * 256.0,
        degenerate as f64 / total as f64);
}
