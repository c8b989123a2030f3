//! Node and wall-clock allowances for the exhaustive searches.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Budget {
    deadline: Option<Instant>,
    max_nodes: Option<u64>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget::unlimited()
    }
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget { deadline: None, max_nodes: None }
    }

    pub fn seconds(s: f64) -> Budget {
        Budget { deadline: Some(Instant::now() + Duration::from_secs_f64(s)), max_nodes: None }
    }

    pub fn with_nodes(mut self, n: u64) -> Budget {
        self.max_nodes = Some(n);
        self
    }

    pub fn with_deadline(mut self, d: Option<Instant>) -> Budget {
        self.deadline = d;
        self
    }

    /// Fails once `nodes` exceeds the node cap or the deadline has passed.
    /// The clock is read only every 4096 nodes.
    #[inline]
    pub fn check(&self, nodes: u64, what: &str) -> Result<()> {
        if let Some(m) = self.max_nodes {
            if nodes > m {
                return Err(Error::Budget(format!("{what}: more than {m} search nodes")));
            }
        }
        if nodes & 0xfff == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    return Err(Error::Budget(format!("{what}: time limit reached")));
                }
            }
        }
        Ok(())
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() > d)
    }
}
