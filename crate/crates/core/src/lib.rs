//! Logic layer of a virtual-reality everyday-assessment battery: the 22-scene
//! scenario engine, task scoring, session logs, a seeded participant
//! simulator, and the questionnaire and Bayesian statistics used to evaluate
//! software versions.

pub mod catalog;
pub mod config;
pub mod scenario;
pub mod scoring;
pub mod session_log;
pub mod par;
pub mod sim;
pub mod vrnq;
pub mod bayes;
