//! Artifact catalog: identifiers, titles, tier indexing and the eight stage
//! specifications that wire artifacts together.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of one assurance artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArtifactId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
    L,
    M,
    N,
    O,
    P,
    Q,
    R,
    S,
    T,
    U,
    V,
    W,
    X,
    Y,
    Z,
    AA,
    BB,
    DD,
    EE,
    FF,
    GG,
    HH,
    II,
    JJ,
    KK,
    LL,
    MM,
    NN,
    OO,
    PP,
    QQ,
    RR,
    SS,
    TT,
    UU,
    VV,
    WW,
    XX,
    YY,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArtifactIdError {
    #[error("unknown artifact id `{0}`")]
    Unknown(String),
}

use ArtifactId::*;

impl ArtifactId {
    pub const ALL: [ArtifactId; 50] = [
        A, B, C, D, E, F, G, H, I, J, K, L, M, N, O, P, Q, R, S, T, U, V, W, X, Y, Z, AA, BB, DD,
        EE, FF, GG, HH, II, JJ, KK, LL, MM, NN, OO, PP, QQ, RR, SS, TT, UU, VV, WW, XX, YY,
    ];

    /// Artifacts that exist once per design tier.
    pub const TIER_INDEXED: [ArtifactId; 12] = [P, Q, R, T, V, W, X, Y, Z, AA, BB, EE];

    /// Argument patterns shipped with the tool rather than authored by users.
    pub const BUILT_IN: [ArtifactId; 8] = [G, I, N, S, U, DD, PP, UU];

    /// Inputs that no stage produces and that users author directly.
    pub const PURE_INPUTS: [ArtifactId; 6] = [A, K, X, FF, JJ, LL];

    pub fn code(self) -> &'static str {
        match self {
            A => "A",
            B => "B",
            C => "C",
            D => "D",
            E => "E",
            F => "F",
            G => "G",
            H => "H",
            I => "I",
            J => "J",
            K => "K",
            L => "L",
            M => "M",
            N => "N",
            O => "O",
            P => "P",
            Q => "Q",
            R => "R",
            S => "S",
            T => "T",
            U => "U",
            V => "V",
            W => "W",
            X => "X",
            Y => "Y",
            Z => "Z",
            AA => "AA",
            BB => "BB",
            DD => "DD",
            EE => "EE",
            FF => "FF",
            GG => "GG",
            HH => "HH",
            II => "II",
            JJ => "JJ",
            KK => "KK",
            LL => "LL",
            MM => "MM",
            NN => "NN",
            OO => "OO",
            PP => "PP",
            QQ => "QQ",
            RR => "RR",
            SS => "SS",
            TT => "TT",
            UU => "UU",
            VV => "VV",
            WW => "WW",
            XX => "XX",
            YY => "YY",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            A => "AS Concept Definition",
            B => "Operational Domain Model",
            C => "ODM Validation Report",
            D => "Autonomous Capabilities Definition",
            E => "Operating Scenarios Definition",
            F => "Operating Scenarios Validation Report",
            G => "AS Operating Context Assurance Argument Pattern",
            H => "AS Operating Context Assurance Argument",
            I => "AS Hazardous Scenarios Assurance Argument Pattern",
            J => "AS Hazardous Scenarios Assurance Argument",
            K => "Definition of sufficiently safe",
            L => "Safe Operating Concept Definition",
            M => "SOC Justification Report",
            N => "SOC Assurance Argument Pattern",
            O => "SOC Assurance Argument",
            P => "Safety Requirements from tier n-1",
            Q => "Safety Requirements for tier n",
            R => "Safety Requirements justification report",
            S => "Safety Requirements Argument Pattern",
            T => "Safety Requirements Argument",
            U => "AS Design Assurance Argument Pattern",
            V => "AS Development Log",
            W => "tier n Design",
            X => "Design Process for tier n",
            Y => "AS Design Justification",
            Z => "AS Design Review",
            AA => "AS Design Assurance Argument",
            BB => "AS Safety Analysis Report",
            DD => "Hazardous Failures Argument Pattern",
            EE => "Hazardous Failures Argument",
            FF => "Key features of Environment Outside ODM",
            GG => "Out of Context Analysis Report",
            HH => "Interpretation of ODM Boundary",
            II => "ODM Boundary Assessment Report",
            JJ => "ODM Transition Model",
            KK => "Transition Assessment Report",
            LL => "Stakeholder Risk Acceptance Definition",
            MM => "Outside ODM Minimum Risk Strategy",
            NN => "Outside ODM Strategy Justification Report",
            OO => "Outside ODM Verification Report",
            PP => "Out of Context Operation Assurance Argument Pattern",
            QQ => "Out of Context Operation Assurance Argument",
            RR => "Verification Strategy",
            SS => "AS Verification Log",
            TT => "Verification Results",
            UU => "AS Verification Argument Pattern",
            VV => "AS Verification Argument",
            WW => "AS Decision Analysis Report",
            XX => "AS Hazardous Scenarios Definition",
            YY => "AS Hazardous Scenarios Validation Report",
        }
    }

    pub fn is_tier_indexed(self) -> bool {
        Self::TIER_INDEXED.contains(&self)
    }

    pub fn is_built_in(self) -> bool {
        Self::BUILT_IN.contains(&self)
    }
}

impl fmt::Display for ArtifactId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for ArtifactId {
    type Err = ArtifactIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let code = s.trim();
        ArtifactId::ALL
            .iter()
            .copied()
            .find(|id| id.code() == code)
            .ok_or_else(|| ArtifactIdError::Unknown(code.to_string()))
    }
}

/// An artifact optionally pinned to a tier, printed as `W@1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArtifactRef {
    pub id: ArtifactId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier: Option<u32>,
}

impl ArtifactRef {
    pub fn new(id: ArtifactId, tier: Option<u32>) -> Self {
        ArtifactRef { id, tier }
    }

    pub fn untiered(id: ArtifactId) -> Self {
        ArtifactRef { id, tier: None }
    }

    pub fn at(id: ArtifactId, tier: u32) -> Self {
        ArtifactRef {
            id,
            tier: Some(tier),
        }
    }
}

impl fmt::Display for ArtifactRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tier {
            Some(t) => write!(f, "{}@{}", self.id, t),
            None => write!(f, "{}", self.id),
        }
    }
}

/// Inputs and outputs of one process stage. Output order follows the order in
/// which the stage's activities create them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageSpec {
    pub number: u8,
    pub name: &'static str,
    pub inputs: &'static [ArtifactId],
    pub outputs: &'static [ArtifactId],
}

impl StageSpec {
    /// Stages whose inputs are tier-indexed and therefore need a tier.
    pub fn is_tiered(&self) -> bool {
        matches!(self.number, 4..=6)
    }
}

pub const STAGES: [StageSpec; 8] = [
    StageSpec {
        number: 1,
        name: "Operating Context Assurance",
        inputs: &[A, G],
        outputs: &[B, C, D, E, F, H],
    },
    StageSpec {
        number: 2,
        name: "AS Hazardous Scenarios Identification",
        inputs: &[B, E, I],
        outputs: &[WW, XX, YY, J],
    },
    StageSpec {
        number: 3,
        name: "Safe Operating Concept Assurance",
        inputs: &[B, D, E, XX, K, N],
        outputs: &[L, M, O],
    },
    StageSpec {
        number: 4,
        name: "AS Safety Requirements Assurance",
        inputs: &[P, W, S],
        outputs: &[Q, R, T],
    },
    StageSpec {
        number: 5,
        name: "AS Design Assurance",
        inputs: &[Q, X, U],
        outputs: &[W, V, Y, Z, AA],
    },
    StageSpec {
        number: 6,
        name: "Hazardous Failures Management",
        inputs: &[B, W, DD],
        outputs: &[BB, Y, Q, EE],
    },
    StageSpec {
        number: 7,
        name: "Out of Context Operation Assurance",
        inputs: &[B, FF, JJ, LL, PP],
        outputs: &[GG, HH, II, KK, MM, NN, OO, QQ],
    },
    StageSpec {
        number: 8,
        name: "AS Verification Assurance",
        inputs: &[B, D, E, L, Q, UU],
        outputs: &[RR, SS, TT, VV],
    },
];

pub fn stage(number: u8) -> Option<&'static StageSpec> {
    STAGES.iter().find(|s| s.number == number)
}

/// Every stage that lists `id` as an output.
pub fn producing_stages(id: ArtifactId) -> impl Iterator<Item = &'static StageSpec> {
    STAGES.iter().filter(move |s| s.outputs.contains(&id))
}

/// Direct upstream artifacts of `id`: for each producing stage, its inputs
/// plus the outputs created earlier in the same stage.
pub fn direct_upstream(id: ArtifactId) -> Vec<ArtifactId> {
    let mut deps = Vec::new();
    for s in producing_stages(id) {
        for input in s.inputs {
            if !deps.contains(input) {
                deps.push(*input);
            }
        }
        for out in s.outputs.iter().take_while(|o| **o != id) {
            if !deps.contains(out) {
                deps.push(*out);
            }
        }
    }
    deps
}
