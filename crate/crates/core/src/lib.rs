//! Static routing and wavelength assignment (RWA) for DWDM transport
//! networks.
//!
//! The solver is a bee colony metaheuristic ([`bco`]) that maximizes the
//! number of established lightpaths under the wavelength-continuity
//! constraint, relaxed at nodes equipped with wavelength converters.
//! [`placement`] finds the busiest transit node of a solution and places a
//! converter there. [`oracle`] is an exhaustive exact solver for small
//! instances and [`bench`] runs the basic/prob/full comparison.

pub mod bco;
pub mod bench;
pub mod cli;
pub mod error;
pub mod io;
pub mod oracle;
pub mod placement;
pub mod route;
pub mod solution;
pub mod state;
pub mod topology;
pub mod wavelength;

pub use bco::{solve, solve_with_state, Mode, SolverConfig};
pub use error::{Error, Result};
pub use oracle::{exhaustive_optimum, exhaustive_optimum_with, OracleResult};
pub use placement::{place_and_solve, place_and_solve_with_state, transit_census, PlacementOutcome};
pub use route::{k_shortest_routes, Route};
pub use solution::{validate_solution, Solution, ValidationReport, Violation, ViolationKind};
pub use state::{NetworkState, Segment, SegmentedAssignment};
pub use topology::{validate_topology, DirectedLink, LightpathId, LightpathRequest, RawTopology, Topology};
pub use wavelength::WavelengthSet;
