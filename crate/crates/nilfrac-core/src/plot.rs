//! Minimal SVG emission for orbits and sweep grids.

use crate::error::DriverError;

/// Render orbit points (and an optional overlay polyline, typically the
/// separatrix) into a standalone SVG document.
pub fn orbit_svg(
    points: &[(f64, f64)],
    overlay: Option<&[(f64, f64)]>,
) -> Result<String, DriverError> {
    if points.is_empty() {
        return Err(DriverError::EmptyPlot);
    }
    let (w, h) = (640.0, 480.0);
    let margin = 30.0;
    let all: Vec<(f64, f64)> = points
        .iter()
        .chain(overlay.unwrap_or(&[]).iter())
        .copied()
        .collect();
    let xlo = all.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let xhi = all.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let ylo = all.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let yhi = all.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let dx = (xhi - xlo).max(1e-12);
    let dy = (yhi - ylo).max(1e-12);
    let sx = |x: f64| margin + (x - xlo) / dx * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - (y - ylo) / dy * (h - 2.0 * margin);

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    if let Some(curve) = overlay {
        if !curve.is_empty() {
            let path: Vec<String> = curve
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#2a9d2a\" stroke-width=\"1\"/>\n",
                path.join(" ")
            ));
        }
    }
    for &(x, y) in points {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.2\" fill=\"#c43131\"/>\n",
            sx(x),
            sy(y)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Render a sweep grid: one square per cell colored by singularity count,
/// with curve-tagged cells outlined.
pub fn sweep_svg(result: &crate::sweep::SweepResult) -> Result<String, DriverError> {
    if result.cells.is_empty() {
        return Err(DriverError::EmptyPlot);
    }
    let n = (result.cells.len() as f64).sqrt().round() as usize;
    let size = 12.0;
    let w = n as f64 * size + 40.0;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{w}\" \
         viewBox=\"0 0 {w} {w}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for (idx, cell) in result.cells.iter().enumerate() {
        let i = idx / n;
        let j = idx % n;
        let x = 20.0 + i as f64 * size;
        let y = w - 20.0 - (j + 1) as f64 * size;
        let fill = match cell.singularities.len() {
            0 => "#f2f2f2",
            1 => "#9ecae1",
            2 => "#3182bd",
            _ => "#08519c",
        };
        let stroke = if cell.curve_tag.is_some() {
            "stroke=\"#d62728\" stroke-width=\"1.5\""
        } else {
            "stroke=\"none\""
        };
        svg.push_str(&format!(
            "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{size}\" height=\"{size}\" fill=\"{fill}\" {stroke}/>\n"
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_svg_contains_points() {
        let pts = vec![(0.1, 0.2), (0.3, 0.4)];
        let svg = orbit_svg(&pts, Some(&[(0.0, 0.0), (0.5, 0.5)])).unwrap();
        assert!(svg.contains("<circle"));
        assert!(svg.contains("<polyline"));
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn empty_orbit_rejected() {
        assert_eq!(orbit_svg(&[], None), Err(DriverError::EmptyPlot));
    }
}
