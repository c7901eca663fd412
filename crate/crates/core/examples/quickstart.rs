use dibmap::{pareto_mapper, JointPMF, SearchConfig};

fn main() -> Result<(), dibmap::DibError> {
    let joint = JointPMF::from_rows(&[vec![0.30, 0.05], vec![0.05, 0.30], vec![0.10, 0.20]])?;
    let (frontier, stats) = pareto_mapper(&joint, &SearchConfig::new(0.01, 42))?;
    for p in frontier.iter() {
        println!("H = {:.3}  I = {:.3}  {:?}", p.entropy(), p.information(), p.encoder);
    }
    println!("{} partitions evaluated", stats.points_searched);
    Ok(())
}
