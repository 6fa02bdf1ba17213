//! Binary-region primitives: 8-connected components, convex hulls of pixel
//! sets and exact rasterization of those hulls.

/// A set of pixels on a `width x height` grid, stored as a dense mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Region {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self { width, height, bits }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn insert(&mut self, x: usize, y: usize) {
        self.bits[y * self.width + x] = true;
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn union(&self, other: &Region) -> Region {
        debug_assert_eq!((self.width, self.height), (other.width, other.height));
        Region {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a || *b).collect(),
        }
    }

    /// Pixel coordinates in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % w, i / w))
    }

    /// 8-connected components, ordered by their first pixel in row-major order.
    pub fn components(&self) -> Vec<Vec<(usize, usize)>> {
        let (w, h) = (self.width, self.height);
        let mut seen = vec![false; w * h];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for start in 0..w * h {
            if !self.bits[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            stack.push(start);
            let mut comp = Vec::new();
            while let Some(i) = stack.pop() {
                let (x, y) = (i % w, i / w);
                comp.push((x, y));
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let nx = x as i64 + dx;
                        let ny = y as i64 + dy;
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let j = ny as usize * w + nx as usize;
                        if self.bits[j] && !seen[j] {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Largest 8-connected component. Ties go to the component whose first
    /// pixel comes earliest in row-major order.
    pub fn largest_component(&self) -> Region {
        let mut best: Option<Vec<(usize, usize)>> = None;
        for comp in self.components() {
            if best.as_ref().is_none_or(|b| comp.len() > b.len()) {
                best = Some(comp);
            }
        }
        let mut region = Region::empty(self.width, self.height);
        for (x, y) in best.into_iter().flatten() {
            region.insert(x, y);
        }
        region
    }

    /// Fill the convex hull of this region's pixel centers.
    pub fn convex_fill(&self) -> Region {
        let hull = convex_hull(&self.row_extremes());
        rasterize_hull(&hull, self.width, self.height)
    }

    /// Leftmost and rightmost pixel of every occupied row. These carry every
    /// hull vertex of the full set.
    fn row_extremes(&self) -> Vec<(i64, i64)> {
        let mut pts = Vec::new();
        for y in 0..self.height {
            let row = &self.bits[y * self.width..(y + 1) * self.width];
            if let Some(first) = row.iter().position(|&b| b) {
                let last = row.iter().rposition(|&b| b).unwrap();
                pts.push((first as i64, y as i64));
                if last != first {
                    pts.push((last as i64, y as i64));
                }
            }
        }
        pts
    }
}

#[inline]
fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Convex hull by Andrew's monotone chain. Returns vertices in
/// counter-clockwise order (in a y-up frame) without collinear points.
/// Degenerate inputs yield one or two vertices.
pub fn convex_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn div_floor(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -div_floor(-a, b)
}

/// Every grid point inside or on the boundary of the hull polygon.
/// Exact integer arithmetic: each hull edge is a half-plane that bounds the
/// x-range of a row from one side.
pub fn rasterize_hull(hull: &[(i64, i64)], width: usize, height: usize) -> Region {
    let mut region = Region::empty(width, height);
    if hull.is_empty() {
        return region;
    }
    let min_x = hull.iter().map(|p| p.0).min().unwrap().max(0);
    let max_x = hull.iter().map(|p| p.0).max().unwrap().min(width as i64 - 1);
    let min_y = hull.iter().map(|p| p.1).min().unwrap().max(0);
    let max_y = hull.iter().map(|p| p.1).max().unwrap().min(height as i64 - 1);
    let n = hull.len();
    for y in min_y..=max_y {
        let mut lo = min_x;
        let mut hi = max_x;
        if n >= 2 {
            for k in 0..n {
                let a = hull[k];
                let b = hull[(k + 1) % n];
                // cross(b - a, p - a) >= 0  <=>  c * x + d >= 0
                let c = -(b.1 - a.1);
                let d = (b.0 - a.0) * (y - a.1) + (b.1 - a.1) * a.0;
                if c > 0 {
                    lo = lo.max(div_ceil(-d, c));
                } else if c < 0 {
                    hi = hi.min(div_floor(d, -c));
                } else if d < 0 {
                    lo = hi + 1;
                    break;
                }
            }
        }
        for x in lo..=hi {
            region.insert(x as usize, y as usize);
        }
    }
    region
}
