//! Darcy friction factor: laminar 64/Re, Colebrook-White for turbulent
//! flow, and a linear blend across the transition band.

const RE_LAMINAR: f64 = 2300.0;
const RE_TURBULENT: f64 = 4000.0;

/// Colebrook-White solved by Newton iteration on x = 1/sqrt(fr).
fn colebrook(re: f64, rel_rough: f64) -> f64 {
    // Haaland explicit formula as the starting guess
    let haaland = -1.8 * ((rel_rough / 3.7).powf(1.11) + 6.9 / re).log10();
    let mut x = haaland.max(1.0);
    for _ in 0..50 {
        // g(x) = x + 2 log10(eps/3.7 + 2.51 x / Re)
        let arg = rel_rough / 3.7 + 2.51 * x / re;
        let g = x + 2.0 * arg.log10();
        let dg = 1.0 + 2.0 / std::f64::consts::LN_10 * (2.51 / re) / arg;
        let step = g / dg;
        x -= step;
        if step.abs() <= 1e-10 * x.abs() {
            break;
        }
    }
    1.0 / (x * x)
}

/// Darcy friction factor for pipe flow at Reynolds number `re` with
/// relative roughness `rel_rough` (roughness / hydraulic diameter).
pub fn friction_factor(re: f64, rel_rough: f64) -> f64 {
    if re <= 0.0 {
        return 0.0;
    }
    if re < RE_LAMINAR {
        64.0 / re
    } else if re >= RE_TURBULENT {
        colebrook(re, rel_rough)
    } else {
        let w = (re - RE_LAMINAR) / (RE_TURBULENT - RE_LAMINAR);
        (1.0 - w) * 64.0 / RE_LAMINAR + w * colebrook(RE_TURBULENT, rel_rough)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn laminar_formula_at_re_64() {
        assert_relative_eq!(friction_factor(64.0, 0.0), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn colebrook_smooth_pipe_at_re_1e5() {
        // classical smooth-pipe value ~0.01799
        let fr = friction_factor(1.0e5, 0.0);
        assert_relative_eq!(fr, 0.01799, max_relative = 2e-3);
        // and the implicit equation itself is satisfied to tight tolerance
        let x = 1.0 / fr.sqrt();
        let resid = x + 2.0 * (2.51 * x / 1.0e5).log10();
        assert!(resid.abs() < 1e-9, "residual {resid}");
    }

    #[test]
    fn monotone_decreasing_in_re_within_each_regime() {
        // the laminar-turbulent transition itself jumps upward, so
        // monotonicity holds on either side of the blend band
        for &rough in &[0.0, 1e-5, 1e-3] {
            for range in [(100.0, RE_LAMINAR), (RE_TURBULENT, 1.0e8)] {
                let mut prev = f64::INFINITY;
                let mut re = range.0;
                while re < range.1 {
                    let fr = friction_factor(re, rough);
                    assert!(fr <= prev + 1e-12, "fr rising at Re={re}, rough={rough}");
                    prev = fr;
                    re *= 1.2;
                }
            }
        }
    }

    #[test]
    fn blend_is_continuous_at_band_edges() {
        for &(re, _) in &[(2300.0, 0.0), (4000.0, 0.0)] {
            let lo = friction_factor(re - 1e-6, 1e-4);
            let hi = friction_factor(re + 1e-6, 1e-4);
            assert_relative_eq!(lo, hi, max_relative = 1e-6);
        }
    }
}
