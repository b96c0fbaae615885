//! Edge counts on a fixed path: eight nodes in four subsamples of two, then
//! the same path read with two groups of four.

use relevance_kit::prelude::*;

fn main() -> relevance_kit::Result<()> {
    // 1-based node labels along the path, shifted to 0-based indices.
    let path = Path::new([2, 3, 4, 1, 5, 7, 8, 6].iter().map(|v| v - 1).collect())?;
    let names = ["X_A", "X_B", "Y_A", "Y_B"];
    let sub = GroupAssignment::from_sizes(&[2, 2, 2, 2])?;
    let table = count_edges(&path, &sub)?;

    println!("path: {:?}", path.order());
    println!("{:>5} {}", "", names.map(|n| format!("{n:>5}")).join(" "));
    for (m, row) in table.rows().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>5}")).collect();
        println!("{:>5} {}", names[m], cells.join(" "));
    }
    println!("total edges: {}", table.total());

    let two = GroupAssignment::from_sizes(&[4, 4])?;
    println!("S(G1, G2) with two groups: {}", count_edges(&path, &two)?.get(0, 1));
    println!(
        "S(X_A u X_B, Y_A u Y_B) by additivity: {}",
        count_between_unions(&path, &sub, &[0, 1], &[2, 3])?
    );
    Ok(())
}
