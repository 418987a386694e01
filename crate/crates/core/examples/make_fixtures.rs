//! Regenerates `fixtures/`: `cargo run -p bellows --example make_fixtures`.

use std::path::Path;

use bellows::continuation::{default_basepoint, generate_lassos, coordinate_directions};
use bellows::flexion::{default_bricard, quadrilateral, ConstraintSystem};
use bellows::gram::{IndexSet, Space};
use bellows::io::{ComplexFile, CoordsFile, EdgesFile, PathFile};
use bellows::polyhedra::Configuration;

fn write(dir: &Path, name: &str, value: &impl serde::Serialize) {
    let body = serde_json::to_string_pretty(value).unwrap();
    std::fs::write(dir.join(name), body + "\n").unwrap();
}

/// Coordinates rounded to 6 digits: a nearby guess that the solvers must repair.
fn rounded(p: &Configuration) -> Configuration {
    Configuration {
        coords: p
            .coords
            .iter()
            .map(|x| x.iter().map(|v| (v * 1e6).round() / 1e6).collect())
            .collect(),
    }
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for (stem, (k, p)) in [("octahedron", default_bricard()), ("quadrilateral", quadrilateral())] {
        let s = ConstraintSystem::from_configuration(k.clone(), &p).unwrap();
        write(&dir, &format!("{stem}.json"), &ComplexFile::from_complex(&k));
        write(&dir, &format!("{stem}_edges.json"), &EdgesFile::from_system(&s));
        write(&dir, &format!("{stem}_coords.json"), &CoordsFile::from_configuration(&k, &rounded(&p)));
    }
    for n in 1..=3 {
        let base = default_basepoint(n, Space::Hyperbolic).unwrap();
        let lassos = generate_lassos(&base, &coordinate_directions(n + 1), 8).unwrap();
        // a loop around the full-determinant component (for n = 1, around 1 - c = 0)
        let full = IndexSet::full(n + 1);
        let l = lassos
            .iter()
            .find(|l| l.component.set == full && (n == 1 || l.component.sign.is_none()))
            .expect("some lasso links the full-determinant component");
        eprintln!("n = {n}: loop around {} at z = {}", l.component, l.root);
        write(&dir, &format!("loop_n{n}.json"), &PathFile::from_path(&l.path, Space::Hyperbolic));
    }
}
