//! The shaping curve that keeps the virtual rate bounded.
//!
//! On [-1, 1] the curve is linear through the origin and quadratic past
//! the knee |x| = P_b, reaching exactly +-1 at the ends. Tabulates the
//! curve for three knee positions, verifies smoothness at the knee by
//! finite differences, and measures the jump the inconsistent mid-segment
//! slope variant would introduce.

use etic::controller::{psat_scalar, PsatCoefficients};

fn main() -> etic::Result<()> {
    for p_b in [0.3, 0.6, 0.9] {
        let c = PsatCoefficients::new(p_b)?;
        println!("P_b = {p_b}: K_m = {:.6}, a_p = {:.6}", c.k_m, c.a_p);
        print!("  x    =");
        let xs = [0.0, 0.25, 0.5, 0.6, 0.75, 0.9, 1.0];
        for x in xs {
            print!(" {x:7.3}");
        }
        println!();
        print!("  psat =");
        for x in xs {
            print!(" {:7.4}", psat_scalar(x, &c));
        }
        println!();

        // C0 and C1 at the knee, by symmetric finite differences
        let h = 1e-7;
        let jump = (psat_scalar(p_b + h, &c) - psat_scalar(p_b - h, &c)).abs();
        let slope_in = (psat_scalar(p_b, &c) - psat_scalar(p_b - h, &c)) / h;
        let slope_out = (psat_scalar(p_b + h, &c) - psat_scalar(p_b, &c)) / h;
        println!("  knee continuity: jump {jump:.2e}, slope {slope_in:.6} -> {slope_out:.6}");

        // domination: |psat(x)| >= |x| everywhere on the grid
        let mut worst = f64::INFINITY;
        for i in -1000..=1000 {
            let x = i as f64 / 1000.0;
            worst = worst.min(psat_scalar(x, &c).abs() - x.abs());
        }
        println!("  min |psat(x)| - |x| on grid: {worst:.3e}");

        // the slope variant that does not meet the outer quadratic
        let k_bad = c.k_m_noncontinuous_variant();
        let gap = (c.a_p * (p_b - 1.0) * (p_b - 1.0) + 1.0) - k_bad * p_b;
        println!(
            "  inconsistent variant: K_m = {k_bad:.6} leaves a {gap:+.4} jump at the knee",
        );
        println!();
    }
    Ok(())
}
