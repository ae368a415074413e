use gamesmooth::format::{load_mesh, off_string, read_obj, read_off, save_off};
use gamesmooth::scenario::perturbed_fan;
use gamesmooth::Mesh;
use proptest::prelude::*;

fn fan_mesh(points: &[(f64, f64)]) -> Mesh {
    let mut pts = vec![[0.0, 0.0]];
    pts.extend(points.iter().map(|&(x, y)| [x, y]));
    let n = points.len();
    let tris = (0..n).map(|i| [0, i + 1, (i + 1) % n + 1]).collect();
    Mesh::from_2d(&pts, tris).unwrap()
}

proptest! {
    #[test]
    fn off_round_trip_is_exact(
        radii in prop::collection::vec(0.1f64..100.0, 3..9),
        z in -5.0f64..5.0,
    ) {
        let n = radii.len();
        let pts: Vec<(f64, f64)> = radii
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                (r * a.cos(), r * a.sin())
            })
            .collect();
        let mesh = fan_mesh(&pts);
        let mut coords = mesh.positions();
        coords[0].z = z;
        let back = read_off(off_string(&mesh, &coords).as_bytes()).unwrap();
        prop_assert_eq!(back.positions(), coords);
        let tris: Vec<_> = back.elements().iter().map(|e| e.indices()).collect();
        let orig: Vec<_> = mesh.elements().iter().map(|e| e.indices()).collect();
        prop_assert_eq!(tris, orig);
    }

    #[test]
    fn perturbed_fans_survive_files(seed in any::<u64>()) {
        let mesh = perturbed_fan(5, seed);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.off");
        save_off(&path, &mesh, &mesh.positions()).unwrap();
        prop_assert_eq!(load_mesh(&path).unwrap().positions(), mesh.positions());
    }
}

#[test]
fn obj_and_off_agree() {
    let obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3\nf 2/1 4/2 3/3\n";
    let off = "OFF\n4 2 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n3 0 1 2\n3 1 3 2\n";
    let a = read_obj(obj.as_bytes()).unwrap();
    let b = read_off(off.as_bytes()).unwrap();
    assert_eq!(a.positions(), b.positions());
    assert_eq!(a.elements(), b.elements());
}
