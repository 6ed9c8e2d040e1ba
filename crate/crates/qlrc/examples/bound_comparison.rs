//! Sweep several dimension upper bounds over the code length and print the
//! comparison as CSV, the same table `qlrc bounds-sweep` writes.

use qlrc::bounds::{sweep, BoundKind, BoundParams, SweepVariable};
use qlrc::cli::table_to_csv;

fn main() {
    let template = BoundParams {
        n: 0,
        k: None,
        d: 3,
        r: 3,
        t: 4,
        s: 1,
    };
    let kinds = [
        BoundKind::QSingleton,
        BoundKind::Gg23,
        BoundKind::ThmPe,
        BoundKind::ThmM1M2,
        BoundKind::ThmRts2,
    ];
    let table = sweep(&kinds, &template, SweepVariable::N, 8, 40);
    print!("{}", table_to_csv(&table));

    // The availability information tightens the generic bounds row by row.
    let all_dominated = table.rows.iter().all(|row| {
        table.cell(row, BoundKind::ThmM1M2) <= table.cell(row, BoundKind::Gg23)
            && table.cell(row, BoundKind::Gg23) <= table.cell(row, BoundKind::QSingleton)
    });
    eprintln!("row-wise dominance q_singleton >= gg23 >= thm_m1m2: {all_dominated}");
}
