use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "sjg", version, about = "Julia sets of polynomial semigroups and their fibers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify boundedness or unboundedness of the postcritical set.
    Postcritical {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 64)]
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        point_cap: usize,
    },
    /// Word-tree grid of the semigroup Julia set with component order.
    Julia {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 24)]
        depth: usize,
        /// Also sample this many chaos-game points into cloud.csv.
        #[arg(long, default_value_t = 0)]
        points: usize,
    },
    /// Escape grid of one fiber.
    Fiber {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        /// periodic:V, periodic:U;V, prefix:W;t, growing:j,x or random:w1,w2@seed
        #[arg(long, default_value = "periodic:0")]
        seq: String,
        #[arg(long, default_value_t = 512)]
        max_iter: usize,
        /// Random vertex pairs for the turning constant.
        #[arg(long, default_value_t = 20_000)]
        pairs: usize,
    },
    /// Trichotomy case and window/recurrence membership of a sequence.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seq: String,
        /// Index of the generator whose Julia set is not a Jordan curve.
        #[arg(long, default_value_t = 0)]
        special: usize,
        /// Generator subset S, comma separated.
        #[arg(long, value_delimiter = ',')]
        subset: Vec<usize>,
        /// Window length p for the W_{S,p} check.
        #[arg(long)]
        window_len: Option<usize>,
        #[arg(long, default_value_t = 4096)]
        horizon: usize,
    },
    /// Monte Carlo statistics of random fibers.
    RandomStats {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 256)]
        length: usize,
        /// Area ladder resolutions for trial 0, e.g. 256,512,1024.
        #[arg(long, value_delimiter = ',')]
        ladder: Vec<usize>,
    },
    /// Check that both generators pull a region back into disjoint subsets.
    CantorVerify {
        #[command(flatten)]
        common: Common,
        /// cx,cy,r_in,r_out
        #[arg(long, allow_hyphen_values = true)]
        annulus: Option<String>,
        /// a,b,c,d;a,b,c,d;... rectangles as re_min,re_max,im_min,im_max
        #[arg(long, allow_hyphen_values = true)]
        rects: Option<String>,
    },
    /// Reproduce a bundled figure.
    Reproduce {
        /// Figure name (dcgraph).
        name: String,
        #[arg(long, default_value_t = 1024)]
        res: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        deterministic: bool,
        #[arg(long)]
        no_png: bool,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Generator config JSON (schema sjg-config/1).
    #[arg(long)]
    pub gens: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: logical cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Omit wall time from reports so reruns are byte-identical.
    #[arg(long)]
    pub deterministic: bool,
    /// Skip PNG output (PPM is always written).
    #[arg(long)]
    pub no_png: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// re_min,re_max,im_min,im_max (default: square of the escape radius)
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    #[arg(long, default_value_t = 512)]
    pub res: usize,
}
