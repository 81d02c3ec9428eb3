//! Fixtures shared by the benchmarks.

use chowvol::corpus::random_matroids;
use chowvol::Matroid;

/// Named matroids of increasing size.
pub fn fixtures() -> Vec<(String, Matroid)> {
    let mut out = vec![
        (
            "plane4".to_string(),
            Matroid::from_bases(&[1, 2, 3, 4], &[vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]]).expect("valid"),
        ),
        ("U(3,5)".to_string(), Matroid::uniform(3, 5).expect("valid")),
        ("U(3,6)".to_string(), Matroid::uniform(3, 6).expect("valid")),
        ("U(4,6)".to_string(), Matroid::uniform(4, 6).expect("valid")),
    ];
    let random = random_matroids(40, 6, 7).expect("sampler");
    if let Some(e) = random.into_iter().filter(|e| e.matroid.len() == 6).max_by_key(|e| e.matroid.rank()) {
        out.push((e.name, e.matroid));
    }
    out
}
