//! When only X shifts the AIB chart still signals, because the chart keeps
//! using the in-control X mean. Prints a slice of the replicated table.

use aibmon::experiments::table1::simulate_cell;
use aibmon::experiments::CellIndex;

fn main() -> aibmon::Result<()> {
    println!("{:>5} {:>5} {:>14} {:>10} {:>10} {:>10}", "rho", "dx", "chart", "arl", "oracle", "reference");
    for index in CellIndex::all().filter(|c| c.column == 0 || c.column == 2) {
        let cell = simulate_cell(index, 5_000, 11)?;
        let col = index.column();
        println!(
            "{:>5.2} {:>5.2} {:>14} {:>10.2} {:>10.2} {:>10.1}",
            cell.rho,
            cell.delta_x,
            format!("{}({})", col.kind, col.lambda),
            cell.summary.arl,
            index.oracle_arl()?,
            cell.reference_arl
        );
    }
    Ok(())
}
