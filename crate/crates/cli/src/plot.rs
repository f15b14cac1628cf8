use std::fmt::Write;

const SIZE: f64 = 800.0;
const MAX_ORBIT_POINTS: usize = 20_000;

fn stereo(u: [f64; 3]) -> Option<[f64; 2]> {
    let d = 1.0 - u[2];
    (d > 1e-9).then(|| [u[0] / d, u[1] / d])
}

/// Stereographic picture from the north pole: Ω as dots, the orbit as a
/// polyline, the south pole as a cross. Far points (near the north pole) are
/// clipped to a window of radius at most 4.
pub fn svg(orbit: &[[f64; 3]], omega: &[[f64; 3]]) -> String {
    let radius = |p: [f64; 2]| p[0].hypot(p[1]);
    let reach = orbit.iter().chain(omega).filter_map(|u| stereo(*u)).map(radius).fold(0.0, f64::max);
    let r = (reach * 1.1).clamp(1.2, 4.0);
    let map = |p: [f64; 2]| ((p[0] / r + 1.0) * SIZE / 2.0, (1.0 - p[1] / r) * SIZE / 2.0);
    let inside = |p: &[f64; 2]| radius(*p) <= r;

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let (cx, cy) = map([0.0, 0.0]);
    writeln!(s, r#"<path d="M{:.1} {cy:.1}h10M{cx:.1} {:.1}v10" stroke="gray"/>"#, cx - 5.0, cy - 5.0).unwrap();

    let step = orbit.len().div_ceil(MAX_ORBIT_POINTS).max(1);
    let mut runs: Vec<Vec<(f64, f64)>> = vec![vec![]];
    let tail = orbit.last().filter(|_| (orbit.len() - 1) % step != 0);
    for u in orbit.iter().step_by(step).chain(tail) {
        match stereo(*u).filter(inside) {
            Some(p) => runs.last_mut().unwrap().push(map(p)),
            None if !runs.last().unwrap().is_empty() => runs.push(vec![]),
            None => {}
        }
    }
    for run in runs.iter().filter(|r| r.len() > 1) {
        s.push_str(r#"<polyline fill="none" stroke="steelblue" stroke-width="0.6" points=""#);
        for (i, (x, y)) in run.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            write!(s, "{x:.2},{y:.2}").unwrap();
        }
        s.push_str("\"/>\n");
    }
    s.push_str(r#"<g fill="crimson">"#);
    s.push('\n');
    for p in omega.iter().filter_map(|u| stereo(*u)).filter(inside) {
        let (x, y) = map(p);
        writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="0.9"/>"#).unwrap();
    }
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clips_the_north_pole() {
        let s = svg(&[[0.0, 0.0, -1.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]], &[[0.0, 1.0, 0.0]]);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert_eq!(s.matches("<circle").count(), 1);
        assert_eq!(s.matches("<polyline").count(), 0);
    }
}
