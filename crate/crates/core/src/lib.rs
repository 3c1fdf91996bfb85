//! Universal globalizations of confluent partial monoid actions on finite
//! metric and topological spaces, with string rewriting as the computational
//! engine.
//!
//! The crate is organized around the pipeline:
//!
//! - [`words`]: monoid presentations as string rewriting systems — shortlex
//!   termination certificates, normal forms, critical pairs, confluence.
//! - [`paction`]: partial actions of a presented monoid on a finite point
//!   set — configuration rewriting, mixed critical pairs, domains and
//!   structural predicates, and builders for actions generated by categories
//!   of maps between subsets.
//! - [`glob`]: the set-level globalization — canonical normal elements, the
//!   total action on them, length-bounded truncations, and a union-find
//!   quotient for arbitrary actions of finite monoids.
//! - [`metglob`]: the metric side — weak pseudometrics, globalized distances
//!   with geodesic witnesses, separation and local isometry checks, metric
//!   gluing and one-step homogenization.
//! - [`fintop`]: finite topologies and the final-topology globalization for
//!   finite monoids — embedding and T1 criteria, closed and open map checks.

pub mod error;
pub mod fintop;
pub mod glob;
pub mod metglob;
pub mod paction;
pub mod words;

pub use error::Error;
pub use fintop::{FiniteTopology, TopologyReport};
pub use glob::{NormalElement, QuotientGlobalization, Truncation};
pub use metglob::{GeodesicWitness, PathForm, WeakPseudometric};
pub use paction::{Config, FiniteMonoid, MonoidAction, PartialAction, Space};
pub use words::{ConfluenceStatus, GeneratorId, Presentation, Word};
