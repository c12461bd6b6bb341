//! Plain SVG drawings of instances with an optional matching or tour
//! overlay. Output is deterministic byte for byte: elements are emitted in
//! index order with fixed-precision coordinates.

use maxgeom::Point2D;

/// What to draw on top of the points.
#[derive(Debug, Clone)]
pub enum Overlay {
    None,
    /// Segments between paired point indices.
    Matching(Vec<(usize, usize)>),
    /// Closed cycle through the listed point indices.
    Tour(Vec<usize>),
}

/// Renders the points into a standalone SVG 1.1 document of the given pixel
/// width. The drawing keeps the mathematical orientation: y grows upward.
/// The viewport is the bounding box plus a 5 percent margin on every side.
pub fn render_svg(points: &[Point2D], overlay: &Overlay, width: f64) -> String {
    let (min_x, min_y, max_x, max_y) = points.iter().fold(
        (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        |(ax, ay, bx, by), p| (ax.min(p.x), ay.min(p.y), bx.max(p.x), by.max(p.y)),
    );
    let (min_x, min_y, max_x, max_y) = if points.is_empty() {
        (0.0, 0.0, 1.0, 1.0)
    } else {
        (min_x, min_y, max_x, max_y)
    };
    let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
    let margin = 0.05 * span;
    let view_w = (max_x - min_x) + 2.0 * margin;
    let view_h = (max_y - min_y) + 2.0 * margin;
    let height = width * view_h / view_w;
    let to_x = |x: f64| x - min_x + margin;
    let to_y = |y: f64| (max_y + margin) - y;

    let dot = 0.008 * span;
    let stroke = 0.004 * span;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {view_w:.6} {view_h:.6}\">\n"
    ));

    let mut line = |a: Point2D, b: Point2D| {
        out.push_str(&format!(
            "  <line x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\" \
             stroke=\"steelblue\" stroke-width=\"{stroke:.6}\" stroke-linecap=\"round\"/>\n",
            to_x(a.x),
            to_y(a.y),
            to_x(b.x),
            to_y(b.y),
        ));
    };
    match overlay {
        Overlay::None => {}
        Overlay::Matching(pairs) => {
            for &(i, j) in pairs {
                line(points[i], points[j]);
            }
        }
        Overlay::Tour(order) => {
            for k in 0..order.len() {
                let next = (k + 1) % order.len();
                line(points[order[k]], points[order[next]]);
            }
        }
    }

    for p in points {
        out.push_str(&format!(
            "  <circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{dot:.6}\" fill=\"black\"/>\n",
            to_x(p.x),
            to_y(p.y),
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point2D> {
        vec![
            Point2D::new(0.0, 0.0),
            Point2D::new(1.0, 0.0),
            Point2D::new(1.0, 1.0),
            Point2D::new(0.0, 1.0),
        ]
    }

    fn count(haystack: &str, needle: &str) -> usize {
        haystack.matches(needle).count()
    }

    #[test]
    fn matching_overlay_has_one_line_per_pair() {
        let svg = render_svg(&square(), &Overlay::Matching(vec![(0, 2), (1, 3)]), 640.0);
        assert!(svg.starts_with("<?xml version=\"1.0\""));
        assert!(svg.contains("version=\"1.1\""));
        assert_eq!(count(&svg, "<circle"), 4);
        assert_eq!(count(&svg, "<line"), 2);
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn tour_overlay_closes_the_cycle() {
        let svg = render_svg(&square(), &Overlay::Tour(vec![0, 2, 1, 3]), 640.0);
        assert_eq!(count(&svg, "<circle"), 4);
        assert_eq!(count(&svg, "<line"), 4);
    }

    #[test]
    fn output_is_byte_deterministic() {
        let a = render_svg(&square(), &Overlay::Tour(vec![0, 1, 2, 3]), 640.0);
        let b = render_svg(&square(), &Overlay::Tour(vec![0, 1, 2, 3]), 640.0);
        assert_eq!(a, b);
    }

    #[test]
    fn y_axis_points_up() {
        let points = vec![Point2D::new(0.0, 0.0), Point2D::new(0.0, 1.0)];
        let svg = render_svg(&points, &Overlay::None, 100.0);
        let cys: Vec<f64> = svg
            .match_indices("cy=\"")
            .map(|(at, _)| {
                let rest = &svg[at + 4..];
                let end = rest.find('"').unwrap();
                rest[..end].parse().unwrap()
            })
            .collect();
        assert_eq!(cys.len(), 2);
        // Point 0 sits below point 1 in the plane, so it gets the larger
        // pixel y.
        assert!(cys[0] > cys[1]);
    }

    #[test]
    fn degenerate_inputs_still_render() {
        let empty = render_svg(&[], &Overlay::None, 640.0);
        assert_eq!(count(&empty, "<circle"), 0);
        assert!(empty.contains("</svg>"));
        let single = render_svg(&[Point2D::new(3.0, 4.0)], &Overlay::None, 640.0);
        assert_eq!(count(&single, "<circle"), 1);
        assert!(!single.contains("NaN"));
        assert!(!single.contains("inf"));
    }
}
