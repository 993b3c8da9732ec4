use super::{prepare_record, WorkflowError};
use crate::dockengine::{dock_and_score, DockResult, ScoringConfig};
use crate::molmodel::{decode_record, write_mol2, Ligand, Pocket};

#[derive(Debug, Clone)]
pub struct Regenerated {
    /// The ligand placed in its best pose.
    pub posed: Ligand,
    pub mol2: String,
    pub result: DockResult,
}

/// Rebuilds a ligand's best pose on demand. The ligand goes through the
/// same preparation and record encoding as a campaign, so the score equals
/// the one in the ranking.
pub fn cmd_regen(smiles: &str, pocket: &Pocket, scoring: &ScoringConfig) -> Result<Regenerated, WorkflowError> {
    let (_, record) = prepare_record(smiles).map_err(|e| WorkflowError::Input(format!("{smiles}: {e}")))?;
    let (ligand, _) = decode_record(&record, 0).map_err(|e| WorkflowError::Runtime(e.to_string()))?;
    let result = dock_and_score(pocket, &ligand, scoring)?;
    let mut posed = ligand;
    posed.set_positions(&result.best_pose.conformation.positions);
    let mol2 = write_mol2(&posed);
    Ok(Regenerated { posed, mol2, result })
}
