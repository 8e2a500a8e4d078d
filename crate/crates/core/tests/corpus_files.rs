use std::path::PathBuf;

use dias_core::corpus;
use dias_core::io::{read_mesh, to_json, MeshInput};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

// Set DIAS_REGENERATE_CORPUS=1 to rewrite the bundled files.
#[test]
fn bundled_files_match_generators() {
    let regenerate = std::env::var_os("DIAS_REGENERATE_CORPUS").is_some();
    for (name, surface) in corpus::all() {
        let path = corpus_dir().join(format!("{name}.json"));
        let expected = MeshInput::from_surface(&surface);
        if regenerate {
            std::fs::write(&path, to_json(&expected)).unwrap();
        }
        let read = read_mesh(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(read, expected, "{name}");
        assert_eq!(read.surface().unwrap().triangles(), surface.triangles(), "{name}");
    }
}

#[test]
fn off_octahedron_parses_with_coordinates() {
    let mesh = read_mesh(&corpus_dir().join("octahedron.off")).unwrap();
    let s = mesh.surface().unwrap();
    assert_eq!(s.triangle_count(), 8);
    assert_eq!(s.euler_characteristic(), 2);
    let g = mesh.geometry().unwrap();
    assert!(g.check_admissible().is_ok());
}
