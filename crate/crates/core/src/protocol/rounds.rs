/// Round end times from per-agent provision times (in steps, each list
/// ascending): the m-th boundary is the first instant by which every agent
/// has provided something since boundary m−1. Stops at the first agent
/// that provides nothing more.
pub fn round_boundaries(provisions: &[Vec<u64>]) -> Vec<u64> {
    let mut out = Vec::new();
    if provisions.is_empty() {
        return out;
    }
    let mut last: Option<u64> = None;
    loop {
        let mut boundary = 0;
        for times in provisions {
            let next = times.iter().find(|&&t| last.is_none_or(|l| t > l));
            match next {
                Some(&t) => boundary = boundary.max(t),
                None => return out,
            }
        }
        out.push(boundary);
        last = Some(boundary);
    }
}
