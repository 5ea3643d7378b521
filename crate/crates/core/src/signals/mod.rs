//! Signal containers and signal processing for the measurement path.

mod csv_io;
mod excitation;
mod filter;
mod hankel;
mod trajectory;

pub use csv_io::{read_csv, write_csv, CsvGroup};
pub use excitation::{
    prbs_load_noise, prbs_load_noise_with_period, white_excitation, Lfsr, PRBS_REGISTERS_PER_CHANNEL,
};
pub use filter::{BandPassFilter, BiquadSection, FilterDesign};
pub use hankel::{build_hankel, HankelConfig, HankelMatrix};
pub use trajectory::{deinterleave, interleave, Trajectory, DEFAULT_SAMPLE_PERIOD};
