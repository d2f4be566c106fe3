use subzero::geometry::project_simplex_euclidean;

fn main() {
    for y in [vec![0.2, 0.3, 0.5], vec![2.0, 0.0, -1.0], vec![0.6, 0.6, 0.6, -3.0], vec![-1.0, -1.0]] {
        let x = project_simplex_euclidean(&y);
        println!("{y:?} -> {x:.4?} (sum {:.3})", x.iter().sum::<f64>());
    }
}
