use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Values attached to a contiguous window of mesh indices.
///
/// `values[i]` sits at mesh point `t_{first + i}`. Difference operators shrink
/// the window, so it is carried explicitly rather than implied.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<'m> {
    mesh: &'m Mesh,
    first: usize,
    values: Vec<f64>,
}

impl<'m> GridFunction<'m> {
    pub fn new(mesh: &'m Mesh, first: usize, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || first + values.len() > mesh.len() {
            return Err(Error::InvalidMesh(format!(
                "window of {} values starting at {first} does not fit a mesh of {} points",
                values.len(),
                mesh.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index: first + i,
                value: values[i],
            });
        }
        Ok(Self {
            mesh,
            first,
            values,
        })
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    /// First mesh index covered.
    pub fn first(&self) -> usize {
        self.first
    }

    /// Last mesh index covered (inclusive).
    pub fn last(&self) -> usize {
        self.first + self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn contains(&self, k: usize) -> bool {
        k >= self.first && k <= self.last()
    }

    /// Value at mesh index `k`, if `k` is inside the window.
    pub fn at(&self, k: usize) -> Option<f64> {
        self.contains(k).then(|| self.values[k - self.first])
    }

    /// `(k, t_k, value)` triples over the window.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.first + i, self.mesh.point(self.first + i), v))
    }

    /// Restriction to mesh indices `lo..=hi`.
    pub fn restrict(&self, lo: usize, hi: usize) -> Result<Self> {
        if lo < self.first || hi > self.last() || lo > hi {
            return Err(Error::InvalidIndex {
                op: "restrict".into(),
                index: if lo < self.first { lo } else { hi },
                lo: self.first,
                hi: self.last(),
            });
        }
        Ok(Self {
            mesh: self.mesh,
            first: lo,
            values: self.values[lo - self.first..=hi - self.first].to_vec(),
        })
    }

    pub fn same_mesh(&self, other: &GridFunction<'_>) -> bool {
        std::ptr::eq(self.mesh, other.mesh) || self.mesh == other.mesh
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_bookkeeping() {
        let mesh = Mesh::uniform(0.0, 1.0, 5).unwrap();
        let g = GridFunction::new(&mesh, 1, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!((g.first(), g.last(), g.len()), (1, 3, 3));
        assert_eq!(g.at(0), None);
        assert_eq!(g.at(2), Some(2.0));
        let r = g.restrict(2, 3).unwrap();
        assert_eq!(r.values(), &[2.0, 3.0]);
        assert!(g.restrict(0, 2).is_err());
        let pts: Vec<f64> = g.iter().map(|(_, t, _)| t).collect();
        assert_eq!(pts, vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn rejects_bad_windows() {
        let mesh = Mesh::uniform(0.0, 1.0, 3).unwrap();
        assert!(GridFunction::new(&mesh, 2, vec![1.0, 2.0]).is_err());
        assert!(GridFunction::new(&mesh, 0, vec![]).is_err());
        assert!(matches!(
            GridFunction::new(&mesh, 0, vec![1.0, f64::INFINITY]),
            Err(Error::NonFinite { index: 1, .. })
        ));
    }
}
