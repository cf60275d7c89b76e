//! Fixtures shared by the benchmarks.

use normloop::{Column, DataType, FunctionalDependency, Table};

/// A relation over `a`, `b`, ... with a chain of dependencies
/// `a -> b`, `b -> c`, ... and one composite determinant.
pub fn chain(n: usize) -> (Table, Vec<FunctionalDependency>) {
    let name = |i: usize| format!("c{i:02}");
    let table = Table::new("r", (0..n).map(|i| Column::new(name(i), DataType::Int)).collect());
    let mut fds: Vec<FunctionalDependency> =
        (0..n - 1).map(|i| FunctionalDependency::new(vec![name(i)], vec![name(i + 1)])).collect();
    if n > 3 {
        fds.push(FunctionalDependency::new(vec![name(1), name(2)], vec![name(n - 1)]));
    }
    (table, fds)
}
