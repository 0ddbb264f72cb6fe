use glam::DVec3;

use super::{Aabb, Ray, Triangle};

const MAX_LEAF: usize = 4;

/// Hit parameters below this fraction of the scene diagonal are ignored.
pub const EPSILON_FRACTION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Node {
    bounds: Aabb,
    /// Leaf: first triangle. Interior: left child, right child is `first + 1`.
    first: u32,
    /// Zero for interior nodes.
    count: u32,
}

/// Bounding volume hierarchy over triangles, built once and queried
/// read-only from any number of threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Bvh {
    nodes: Vec<Node>,
    triangles: Vec<Triangle>,
    epsilon: f64,
}

/// Median split on the longest axis of the centroid bounds, leaves of at
/// most four triangles. Deterministic for a given input order.
pub fn build_bvh(triangles: &[Triangle]) -> Bvh {
    let n = triangles.len();
    let epsilon = Aabb::from_points(triangles.iter().flat_map(|t| [t.a, t.b, t.c]))
        .map_or(0.0, |b| b.diagonal() * EPSILON_FRACTION);
    if n == 0 {
        return Bvh {
            nodes: Vec::new(),
            triangles: Vec::new(),
            epsilon,
        };
    }

    let centroids: Vec<DVec3> = triangles.iter().map(Triangle::centroid).collect();
    let boxes: Vec<Aabb> = triangles.iter().map(Triangle::bounds).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut nodes = vec![Node {
        bounds: Aabb::EMPTY,
        first: 0,
        count: 0,
    }];
    let mut pending = vec![(0usize, 0usize, n)];

    while let Some((node, start, end)) = pending.pop() {
        let range = &mut order[start..end];
        let bounds = range.iter().fold(Aabb::EMPTY, |b, &i| b.union(boxes[i]));
        if range.len() <= MAX_LEAF {
            nodes[node] = Node {
                bounds,
                first: start as u32,
                count: range.len() as u32,
            };
            continue;
        }
        let spread = range
            .iter()
            .fold(Aabb::EMPTY, |b, &i| b.grow(centroids[i]))
            .extent();
        let axis = if spread.x >= spread.y && spread.x >= spread.z {
            0
        } else if spread.y >= spread.z {
            1
        } else {
            2
        };
        let half = range.len() / 2;
        range.select_nth_unstable_by(half, |&i, &j| {
            centroids[i][axis]
                .total_cmp(&centroids[j][axis])
                .then(i.cmp(&j))
        });
        let left = nodes.len();
        nodes.push(nodes[node]);
        nodes.push(nodes[node]);
        nodes[node] = Node {
            bounds,
            first: left as u32,
            count: 0,
        };
        pending.push((left + 1, start + half, end));
        pending.push((left, start, start + half));
    }

    Bvh {
        nodes,
        triangles: order.into_iter().map(|i| triangles[i]).collect(),
        epsilon,
    }
}

impl Bvh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    /// Self-intersection tolerance: `1e-4` times the scene diagonal.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Any-hit query: true iff a triangle of another face crosses the ray at
    /// a parameter in `(epsilon, ray.t_max)`.
    pub fn occluded(&self, ray: &Ray, ignore_face: usize) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let inv_dir = ray.inv_direction();
        let mut stack = [0u32; 64];
        let mut top = 1;
        while top > 0 {
            top -= 1;
            let node = &self.nodes[stack[top] as usize];
            if !node
                .bounds
                .hit(ray.origin, inv_dir, self.epsilon, ray.t_max)
            {
                continue;
            }
            if node.count > 0 {
                let first = node.first as usize;
                for tri in &self.triangles[first..first + node.count as usize] {
                    if tri.face_index == ignore_face {
                        continue;
                    }
                    if let Some(t) = tri.intersect(ray.origin, ray.direction) {
                        if t > self.epsilon && t < ray.t_max {
                            return true;
                        }
                    }
                }
            } else {
                stack[top] = node.first;
                stack[top + 1] = node.first + 1;
                top += 2;
            }
        }
        false
    }

    /// Checks the structural invariants: each input triangle sits in exactly
    /// one leaf, leaves hold at most four triangles, and every box encloses
    /// its subtree.
    pub fn validate(&self) -> Result<(), String> {
        if self.nodes.is_empty() {
            return if self.triangles.is_empty() {
                Ok(())
            } else {
                Err("triangles without nodes".into())
            };
        }
        let mut covered = vec![0u32; self.triangles.len()];
        let mut stack = vec![(0usize, None::<Aabb>)];
        while let Some((i, parent)) = stack.pop() {
            let node = self.nodes.get(i).ok_or("dangling child index")?;
            if let Some(p) = parent {
                if !p.contains(&node.bounds) {
                    return Err(format!("node {i} escapes its parent box"));
                }
            }
            if node.count > 0 {
                if node.count as usize > MAX_LEAF {
                    return Err(format!("leaf {i} holds {} triangles", node.count));
                }
                let range = node.first as usize..(node.first + node.count) as usize;
                for (slot, tri) in self.triangles[range.clone()].iter().enumerate() {
                    if !node.bounds.contains(&tri.bounds()) {
                        return Err(format!("leaf {i} does not enclose its triangles"));
                    }
                    covered[range.start + slot] += 1;
                }
            } else {
                stack.push((node.first as usize, Some(node.bounds)));
                stack.push((node.first as usize + 1, Some(node.bounds)));
            }
        }
        match covered.iter().position(|&c| c != 1) {
            Some(slot) => Err(format!("triangle slot {slot} reached {} times", covered[slot])),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_tri(face_index: usize, z: f64) -> Triangle {
        Triangle::new(
            DVec3::new(0.0, 0.0, z),
            DVec3::new(1.0, 0.0, z),
            DVec3::new(0.0, 1.0, z),
            face_index,
        )
    }

    #[test]
    fn empty_scene_never_occludes() {
        let bvh = build_bvh(&[]);
        assert!(bvh.is_empty());
        bvh.validate().unwrap();
        let ray = Ray::unbounded(DVec3::ZERO, DVec3::Z);
        assert!(!bvh.occluded(&ray, 0));
    }

    #[test]
    fn single_triangle_is_one_leaf() {
        let bvh = build_bvh(&[unit_tri(0, 0.0)]);
        assert_eq!(bvh.node_count(), 1);
        bvh.validate().unwrap();
    }

    #[test]
    fn ignore_face_excludes_the_only_hit() {
        let bvh = build_bvh(&[unit_tri(7, 1.0), unit_tri(3, -5.0)]);
        let ray = Ray::unbounded(DVec3::new(0.2, 0.2, 0.0), DVec3::Z);
        assert!(bvh.occluded(&ray, 3));
        assert!(!bvh.occluded(&ray, 7));
        let short = Ray::new(ray.origin, ray.direction, 0.5);
        assert!(!bvh.occluded(&short, 3));
    }

    #[test]
    fn coincident_stack_builds_and_validates() {
        let tris: Vec<_> = (0..37).map(|i| unit_tri(i, 0.0)).collect();
        let bvh = build_bvh(&tris);
        bvh.validate().unwrap();
        assert_eq!(bvh.len(), 37);
    }

    #[test]
    fn build_is_deterministic() {
        let tris: Vec<_> = (0..200)
            .map(|i| {
                let f = i as f64;
                Triangle::new(
                    DVec3::new(f.sin() * 3.0, f.cos(), (f * 0.37).sin()),
                    DVec3::new(f.sin() * 3.0 + 0.1, f.cos(), (f * 0.37).sin()),
                    DVec3::new(f.sin() * 3.0, f.cos() + 0.1, (f * 0.37).sin()),
                    i,
                )
            })
            .collect();
        assert_eq!(build_bvh(&tris), build_bvh(&tris));
        build_bvh(&tris).validate().unwrap();
    }
}
