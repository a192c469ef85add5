//! Builds the backward partition process for a hand-written update schedule
//! and prints the marked times.

use gibbs_coupling::coupling::{PartitionProcess, UpdateSchedule};

fn main() -> gibbs_coupling::error::Result<()> {
    let sched = UpdateSchedule::new(0, vec![(0, 1), (2, 3), (1, 2), (0, 3), (4, 0)])?;
    let p = PartitionProcess::build(&sched, 5);
    println!("connected: {}, tau = {:?}", p.connected(), p.tau);
    for m in p.marked_ascending() {
        println!("t = {}: S1 = {:?}, S2 = {:?}", m.t, m.s1, m.s2);
    }
    for t in 0..=sched.end() {
        println!("P_{t} = {:?}", p.partition_at(t));
    }
    Ok(())
}
