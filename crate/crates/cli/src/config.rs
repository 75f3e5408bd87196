use clap::Args;
use intervalrdf_core::dataset::DEFAULT_BROADCAST_THRESHOLD;
use intervalrdf_core::hierarchy::{DEFAULT_MAX_WIDTH, MAX_SUPPORTED_WIDTH};

fn default_partitions() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_partitions(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_width(s: &str) -> Result<u32, String> {
    let w: u32 = s.parse().map_err(|e: std::num::ParseIntError| e.to_string())?;
    if (2..=MAX_SUPPORTED_WIDTH).contains(&w) {
        Ok(w)
    } else {
        Err(format!("must be between 2 and {MAX_SUPPORTED_WIDTH}"))
    }
}

/// Settings shared by every command. Flags win over the environment.
#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    /// Worker partitions [default: available cores]
    #[arg(long, global = true, env = "LITEMAT_PARTITIONS", value_parser = parse_partitions)]
    pub partitions: Option<usize>,

    /// Widest hierarchy code allowed, in bits
    #[arg(long, global = true, env = "LITEMAT_MAX_WIDTH", default_value_t = DEFAULT_MAX_WIDTH, value_parser = parse_width)]
    pub max_width: u32,

    /// Term maps at least this large are joined by re-partitioning instead
    /// of being replicated
    #[arg(long, global = true, env = "LITEMAT_BCAST_THRESHOLD", default_value_t = DEFAULT_BROADCAST_THRESHOLD)]
    pub broadcast_threshold: usize,
}

impl RunConfig {
    pub fn partitions(&self) -> usize {
        self.partitions.unwrap_or_else(default_partitions)
    }
}
