//! Planar convex hull (Andrew's monotone chain) and point-in-polygon tests.

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Indices of the strict vertices of the convex hull, counter-clockwise.
/// Collinear boundary points are not vertices.
pub fn convex_hull_vertices(points: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        points[i][0]
            .total_cmp(&points[j][0])
            .then(points[i][1].total_cmp(&points[j][1]))
    });
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() <= 2 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && cross(
                points[lower[lower.len() - 2]],
                points[lower[lower.len() - 1]],
                points[i],
            ) <= 0.0
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && cross(
                points[upper[upper.len() - 2]],
                points[upper[upper.len() - 1]],
                points[i],
            ) <= 0.0
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Whether `p` lies in the closed convex polygon given by its CCW vertices.
pub fn point_in_convex_polygon(vertices: &[[f64; 2]], p: [f64; 2], tol: f64) -> bool {
    match vertices.len() {
        0 => false,
        1 => (vertices[0][0] - p[0]).hypot(vertices[0][1] - p[1]) <= tol,
        2 => on_segment(p, vertices[0], vertices[1], tol),
        n => (0..n).all(|i| cross(vertices[i], vertices[(i + 1) % n], p) >= -tol),
    }
}

/// Whether `a` lies on the closed segment `[x, y]`.
pub fn on_segment(a: [f64; 2], x: [f64; 2], y: [f64; 2], tol: f64) -> bool {
    if cross(x, y, a).abs() > tol {
        return false;
    }
    let within = |k: usize| a[k] >= x[k].min(y[k]) - tol && a[k] <= x[k].max(y[k]) + tol;
    within(0) && within(1)
}
