//! Operation signatures for the action language.
//!
//! Each callable surface form (constructor or `Utils.*` function) has one
//! or more signatures. A signature fixes the canonical parameter order,
//! which parameters are optional, and the operation kind it denotes.
//! Parsing resolves every call against this table; canonical emission
//! replays it.

use serde::{Deserialize, Serialize};

/// The action vocabulary. One value per distinct layout operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpKind {
    ModuleAbsolute,
    ModuleRelative,
    Split,
    Merge,
    UnitFromModules,
    UnitDirectional,
    RoomContainer,
    RoomDirectional,
    RoomCorner,
    RoomRelative,
    RoomAtPoint,
    DoorForRoom,
    DoorForModule,
    DoorMidpoint,
    Hole,
}

impl OpKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OpKind::ModuleAbsolute => "module-absolute",
            OpKind::ModuleRelative => "module-relative",
            OpKind::Split => "split",
            OpKind::Merge => "merge",
            OpKind::UnitFromModules => "unit-from-modules",
            OpKind::UnitDirectional => "unit-directional",
            OpKind::RoomContainer => "room-container",
            OpKind::RoomDirectional => "room-directional",
            OpKind::RoomCorner => "room-corner",
            OpKind::RoomRelative => "room-relative",
            OpKind::RoomAtPoint => "room-at-point",
            OpKind::DoorForRoom => "door-for-room",
            OpKind::DoorForModule => "door-for-module",
            OpKind::DoorMidpoint => "door-midpoint",
            OpKind::Hole => "hole",
        }
    }
}

impl std::fmt::Display for OpKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Entity kinds referred to by arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Module,
    Unit,
    Room,
}

/// Closed string domains used by enum-valued parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumClass {
    Direction,
    Corner,
    Alignment,
    OffsetDirection,
    SplitDirection,
    SetMode,
}

impl EnumClass {
    pub fn domain(self) -> &'static [&'static str] {
        match self {
            EnumClass::Direction => &["north", "south", "east", "west"],
            EnumClass::Corner => &["northeast", "northwest", "southeast", "southwest"],
            EnumClass::Alignment | EnumClass::OffsetDirection => {
                &["north", "south", "east", "west", "none"]
            }
            EnumClass::SplitDirection => &["west-east", "north-south"],
            EnumClass::SetMode => &["in", "out"],
        }
    }

    pub fn contains(self, value: &str) -> bool {
        self.domain().iter().any(|v| *v == value)
    }

    pub fn describe(self) -> &'static str {
        match self {
            EnumClass::Direction => "direction",
            EnumClass::Corner => "corner",
            EnumClass::Alignment => "alignment",
            EnumClass::OffsetDirection => "offset direction",
            EnumClass::SplitDirection => "split direction",
            EnumClass::SetMode => "set mode",
        }
    }
}

/// What a parameter slot accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Free text (entity display name).
    Name,
    Enum(EnumClass),
    Number,
    Bool,
    Point,
    Ref(EntityKind),
    ModuleList,
    NumberList,
}

/// Default used when an optional parameter is omitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DefaultVal {
    Num(f64),
    Text(&'static str),
    Bool(bool),
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: Option<DefaultVal>,
}

impl Param {
    pub fn required(&self) -> bool {
        self.default.is_none()
    }
}

const fn req(name: &'static str, kind: ParamKind) -> Param {
    Param {
        name,
        kind,
        default: None,
    }
}

const fn opt(name: &'static str, kind: ParamKind, default: DefaultVal) -> Param {
    Param {
        name,
        kind,
        default: Some(default),
    }
}

/// Surface form a signature is invoked through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Callee {
    NewModule,
    NewUnit,
    NewRoom,
    Utils(&'static str),
}

impl Callee {
    pub fn render(&self) -> String {
        match self {
            Callee::NewModule => "new Module".to_string(),
            Callee::NewUnit => "new Unit".to_string(),
            Callee::NewRoom => "new Room".to_string(),
            Callee::Utils(f) => format!("Utils.{f}"),
        }
    }
}

/// What a call evaluates to, for result bindings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultKind {
    Module,
    Unit,
    Room,
    ModuleList,
    NoResult,
}

#[derive(Debug, Clone, Copy)]
pub struct Signature {
    pub op: OpKind,
    pub callee: Callee,
    pub params: &'static [Param],
    pub result: ResultKind,
}

use DefaultVal as D;
use EntityKind::{Module as KModule, Room as KRoom, Unit as KUnit};
use EnumClass as E;
use ParamKind as P;

/// All signatures, in resolution priority order per callee.
pub static SIGNATURES: &[Signature] = &[
    // new Module(...)
    Signature {
        op: OpKind::ModuleAbsolute,
        callee: Callee::NewModule,
        params: &[
            req("name", P::Name),
            req("point", P::Point),
            req("length", P::Number),
            req("width", P::Number),
        ],
        result: ResultKind::Module,
    },
    Signature {
        op: OpKind::ModuleRelative,
        callee: Callee::NewModule,
        params: &[
            req("name", P::Name),
            req("module", P::Ref(KModule)),
            req("direction", P::Enum(E::Direction)),
            req("length", P::Number),
            req("width", P::Number),
            opt("alignment", P::Enum(E::Alignment), D::Text("none")),
            opt("offset_direction", P::Enum(E::OffsetDirection), D::Text("none")),
            opt("offset", P::Number, D::Num(0.0)),
        ],
        result: ResultKind::Module,
    },
    // new Unit(...)
    Signature {
        op: OpKind::UnitFromModules,
        callee: Callee::NewUnit,
        params: &[req("name", P::Name), req("modules", P::ModuleList)],
        result: ResultKind::Unit,
    },
    Signature {
        op: OpKind::UnitDirectional,
        callee: Callee::NewUnit,
        params: &[
            req("name", P::Name),
            req("modules", P::ModuleList),
            req("direction", P::Enum(E::Direction)),
            req("dimensions", P::NumberList),
        ],
        result: ResultKind::Unit,
    },
    // new Room(...): container, directional, corner, relative, at-point,
    // each with a module-hosted and a unit-hosted shape where applicable.
    Signature {
        op: OpKind::RoomContainer,
        callee: Callee::NewRoom,
        params: &[
            req("name", P::Name),
            req("module", P::Ref(KModule)),
            req("unit", P::Ref(KUnit)),
            req("regular", P::Bool),
        ],
        result: ResultKind::Room,
    },
    Signature {
        op: OpKind::RoomContainer,
        callee: Callee::NewRoom,
        params: &[
            req("name", P::Name),
            req("unit", P::Ref(KUnit)),
            req("regular", P::Bool),
        ],
        result: ResultKind::Room,
    },
    Signature {
        op: OpKind::RoomDirectional,
        callee: Callee::NewRoom,
        params: &[
            req("name", P::Name),
            req("module", P::Ref(KModule)),
            req("unit", P::Ref(KUnit)),
            req("direction", P::Enum(E::Direction)),
            req("dimension", P::Number),
            opt("open", P::Bool, D::Bool(false)),
        ],
        result: ResultKind::Room,
    },
    Signature {
        op: OpKind::RoomDirectional,
        callee: Callee::NewRoom,
        params: &[
            req("name", P::Name),
            req("unit", P::Ref(KUnit)),
            req("direction", P::Enum(E::Direction)),
            req("dimension", P::Number),
            opt("open", P::Bool, D::Bool(false)),
        ],
        result: ResultKind::Room,
    },
    Signature {
        op: OpKind::RoomCorner,
        callee: Callee::NewRoom,
        params: &[
            req("name", P::Name),
            req("module", P::Ref(KModule)),
            req("unit", P::Ref(KUnit)),
            req("corner", P::Enum(E::Corner)),
            req("length", P::Number),
            req("width", P::Number),
            opt("offset_direction", P::Enum(E::OffsetDirection), D::Text("none")),
            opt("offset", P::Number, D::Num(0.0)),
            opt("open", P::Bool, D::Bool(false)),
        ],
        result: ResultKind::Room,
    },
    Signature {
        op: OpKind::RoomCorner,
        callee: Callee::NewRoom,
        params: &[
            req("name", P::Name),
            req("unit", P::Ref(KUnit)),
            req("corner", P::Enum(E::Corner)),
            req("length", P::Number),
            req("width", P::Number),
            opt("offset_direction", P::Enum(E::OffsetDirection), D::Text("none")),
            opt("offset", P::Number, D::Num(0.0)),
            opt("open", P::Bool, D::Bool(false)),
        ],
        result: ResultKind::Room,
    },
    Signature {
        op: OpKind::RoomRelative,
        callee: Callee::NewRoom,
        params: &[
            req("name", P::Name),
            req("unit", P::Ref(KUnit)),
            req("room", P::Ref(KRoom)),
            req("direction", P::Enum(E::Direction)),
            req("length", P::Number),
            req("width", P::Number),
            opt("alignment", P::Enum(E::Alignment), D::Text("none")),
            opt("offset_direction", P::Enum(E::OffsetDirection), D::Text("none")),
            opt("offset", P::Number, D::Num(0.0)),
            opt("open", P::Bool, D::Bool(false)),
        ],
        result: ResultKind::Room,
    },
    Signature {
        op: OpKind::RoomAtPoint,
        callee: Callee::NewRoom,
        params: &[
            req("name", P::Name),
            req("unit", P::Ref(KUnit)),
            req("point", P::Point),
            req("length", P::Number),
            req("width", P::Number),
        ],
        result: ResultKind::Room,
    },
    // Utils.*
    Signature {
        op: OpKind::Split,
        callee: Callee::Utils("SplitModule"),
        params: &[
            req("module", P::Ref(KModule)),
            req("direction", P::Enum(E::SplitDirection)),
            req("ratio", P::Number),
        ],
        result: ResultKind::ModuleList,
    },
    Signature {
        op: OpKind::Merge,
        callee: Callee::Utils("MergeModules"),
        params: &[req("modules", P::ModuleList)],
        result: ResultKind::Module,
    },
    Signature {
        op: OpKind::DoorForRoom,
        callee: Callee::Utils("CreateDoorForRoom"),
        params: &[
            req("room", P::Ref(KRoom)),
            req("direction", P::Enum(E::Direction)),
            opt("alignment", P::Enum(E::Alignment), D::Text("none")),
            opt("offset", P::Number, D::Num(0.0)),
            opt("set", P::Enum(E::SetMode), D::Text("in")),
            opt("set_dimension", P::Number, D::Num(0.0)),
            opt("dimension", P::Number, D::Num(900.0)),
        ],
        result: ResultKind::NoResult,
    },
    Signature {
        op: OpKind::DoorForModule,
        callee: Callee::Utils("CreateDoorForModule"),
        params: &[
            req("module", P::Ref(KModule)),
            req("direction", P::Enum(E::Direction)),
            opt("alignment", P::Enum(E::Alignment), D::Text("none")),
            opt("offset", P::Number, D::Num(0.0)),
            opt("set", P::Enum(E::SetMode), D::Text("in")),
            opt("set_dimension", P::Number, D::Num(0.0)),
            opt("dimension", P::Number, D::Num(900.0)),
        ],
        result: ResultKind::NoResult,
    },
    Signature {
        op: OpKind::DoorMidpoint,
        callee: Callee::Utils("CreateDoorOnMidpointForRoom"),
        params: &[
            req("room", P::Ref(KRoom)),
            req("direction", P::Enum(E::Direction)),
            opt("dimension", P::Number, D::Num(900.0)),
            opt("set", P::Enum(E::SetMode), D::Text("in")),
            opt("set_dimension", P::Number, D::Num(0.0)),
        ],
        result: ResultKind::NoResult,
    },
    Signature {
        op: OpKind::DoorMidpoint,
        callee: Callee::Utils("CreateDoorOnMidpointForModule"),
        params: &[
            req("module", P::Ref(KModule)),
            req("direction", P::Enum(E::Direction)),
            opt("dimension", P::Number, D::Num(900.0)),
            opt("set", P::Enum(E::SetMode), D::Text("in")),
            opt("set_dimension", P::Number, D::Num(0.0)),
        ],
        result: ResultKind::NoResult,
    },
    Signature {
        op: OpKind::Hole,
        callee: Callee::Utils("CreateHole"),
        params: &[
            req("module", P::Ref(KModule)),
            req("direction", P::Enum(E::Direction)),
            opt("alignment", P::Enum(E::Alignment), D::Text("none")),
            opt("offset", P::Number, D::Num(0.0)),
            req("dimension", P::Number),
        ],
        result: ResultKind::NoResult,
    },
];

/// Signature indices for a constructor name (`Module`, `Unit`, `Room`).
pub fn ctor_signatures(type_name: &str) -> Vec<usize> {
    let callee = match type_name {
        "Module" => Callee::NewModule,
        "Unit" => Callee::NewUnit,
        "Room" => Callee::NewRoom,
        _ => return Vec::new(),
    };
    SIGNATURES
        .iter()
        .enumerate()
        .filter(|(_, s)| s.callee == callee)
        .map(|(i, _)| i)
        .collect()
}

/// Signature indices for a `Utils.<name>` call.
pub fn utils_signatures(fn_name: &str) -> Vec<usize> {
    SIGNATURES
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s.callee, Callee::Utils(f) if f == fn_name))
        .map(|(i, _)| i)
        .collect()
}

pub fn signature(idx: usize) -> &'static Signature {
    &SIGNATURES[idx]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_op_kind_has_a_signature() {
        use OpKind::*;
        for op in [
            ModuleAbsolute,
            ModuleRelative,
            Split,
            Merge,
            UnitFromModules,
            UnitDirectional,
            RoomContainer,
            RoomDirectional,
            RoomCorner,
            RoomRelative,
            RoomAtPoint,
            DoorForRoom,
            DoorForModule,
            DoorMidpoint,
            Hole,
        ] {
            assert!(
                SIGNATURES.iter().any(|s| s.op == op),
                "missing signature for {op}"
            );
        }
    }

    #[test]
    fn optional_params_trail_required_ones_except_hole_dimension() {
        for sig in SIGNATURES {
            let names: Vec<&str> = sig.params.iter().map(|p| p.name).collect();
            assert_eq!(
                names.len(),
                names
                    .iter()
                    .collect::<std::collections::BTreeSet<_>>()
                    .len(),
                "duplicate param in {:?}",
                sig.op
            );
        }
    }

    #[test]
    fn utils_lookup_finds_known_functions() {
        assert_eq!(utils_signatures("SplitModule").len(), 1);
        assert_eq!(utils_signatures("CreateDoorOnMidpointForRoom").len(), 1);
        assert!(utils_signatures("CreateWindow").is_empty());
        assert_eq!(ctor_signatures("Room").len(), 8);
    }
}
