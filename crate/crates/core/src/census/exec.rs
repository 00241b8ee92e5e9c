/// How work items are executed. Results never depend on the choice: partial
/// results are combined with an associative, commutative merge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Executor {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel(usize),
}

impl Default for Executor {
    fn default() -> Self {
        Executor::with_workers(Executor::available())
    }
}

impl Executor {
    pub fn available() -> usize {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    }

    /// Sequential for one worker, or when built without the `parallel`
    /// feature.
    pub fn with_workers(workers: usize) -> Self {
        #[cfg(feature = "parallel")]
        if workers > 1 {
            return Executor::Parallel(workers);
        }
        let _ = workers;
        Executor::Sequential
    }

    pub fn workers(&self) -> usize {
        match self {
            Executor::Sequential => 1,
            #[cfg(feature = "parallel")]
            Executor::Parallel(n) => *n,
        }
    }

    /// Maps every item and folds the results with `merge`.
    pub(crate) fn map_reduce<T, R, M, F>(&self, items: Vec<T>, map: M, merge: F) -> Option<R>
    where
        T: Send,
        R: Send,
        M: Fn(T) -> R + Sync + Send,
        F: Fn(R, R) -> R + Sync + Send,
    {
        match self {
            Executor::Sequential => items.into_iter().map(map).reduce(merge),
            #[cfg(feature = "parallel")]
            Executor::Parallel(n) => {
                use rayon::prelude::*;
                pool(*n).install(|| items.into_par_iter().map(map).reduce_with(merge))
            }
        }
    }

    /// Maps every item, keeping input order.
    pub(crate) fn map_ordered<T, R, M>(&self, items: &[T], map: M) -> Vec<R>
    where
        T: Sync,
        R: Send,
        M: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Executor::Sequential => items.iter().map(map).collect(),
            #[cfg(feature = "parallel")]
            Executor::Parallel(n) => {
                use rayon::prelude::*;
                pool(*n).install(|| items.par_iter().map(map).collect())
            }
        }
    }
}

#[cfg(feature = "parallel")]
fn pool(workers: usize) -> std::sync::Arc<rayon::ThreadPool> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};

    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS.get_or_init(Default::default).lock().expect("pool cache");
    pools
        .entry(workers)
        .or_insert_with(|| {
            Arc::new(rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool"))
        })
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn executors_agree() {
        let items: Vec<u64> = (0..1000).collect();
        for w in [1, 2, 8] {
            let ex = Executor::with_workers(w);
            let sum = ex.map_reduce(items.clone(), |x| x * x, |a, b| a + b).unwrap();
            assert_eq!(sum, (0..1000u64).map(|x| x * x).sum::<u64>());
            assert_eq!(ex.map_ordered(&items, |x| x + 1), (1..=1000).collect::<Vec<u64>>());
        }
        assert_eq!(Executor::Sequential.map_reduce(Vec::<u8>::new(), |x| x, |a, _| a), None);
    }
}
