use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Usable as a unitary, transformation, torus-loop family as needed.
    Any,
    Unitary,
    Transformation,
    TorusLoop,
    ContactForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: FamilyKind,
    pub parameters: &'static str,
    pub models: &'static str,
    /// The mathematical statement the family reproduces.
    pub statement: &'static str,
}

const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "identity",
        kind: FamilyKind::Any,
        parameters: "",
        models: "linear_contact_sphere, torus, cp1",
        statement: "the constant family at the identity has every index equal to 0",
    },
    CatalogEntry {
        name: "su2_generator",
        kind: FamilyKind::Unitary,
        parameters: "",
        models: "linear_contact_sphere (n >= 2)",
        statement: "mu_2 of the generator S^3 -> SU(2) of pi_3 U(n) equals 1, in U(2) and stabilized",
    },
    CatalogEntry {
        name: "clifford_generator",
        kind: FamilyKind::Unitary,
        parameters: "",
        models: "linear_contact_sphere (n >= 4)",
        statement: "the column map of the Clifford generator S^5 -> U(4) has degree 2 = 2!, so mu_3 = 1",
    },
    CatalogEntry {
        name: "diagonal_loop",
        kind: FamilyKind::Unitary,
        parameters: "windings: [int]",
        models: "linear_contact_sphere",
        statement: "mu_1 of a diagonal loop is the total winding of its determinant (the classical Maslov index)",
    },
    CatalogEntry {
        name: "sampled",
        kind: FamilyKind::Unitary,
        parameters: "data: {param_dim, level, values}",
        models: "linear_contact_sphere",
        statement: "a grid-sampled unitary family, spherical barycentric interpolation on the refined cross-polytope",
    },
    CatalogEntry {
        name: "cp1_rotation",
        kind: FamilyKind::Transformation,
        parameters: "axis: [x, y, z], turns: int = 1",
        models: "cp1",
        statement: "a full rotation of CP^1 has B-type mu_1 = 1 = -1 mod N_1 = 2 at its fixed points",
    },
    CatalogEntry {
        name: "torus_translation",
        kind: FamilyKind::TorusLoop,
        parameters: "vector: [int]",
        models: "torus",
        statement: "a translation loop of T^2n has mu_1 = 0 in the coordinate frame, 1 in the frame twisted along \
                    it; its flux is the swept area",
    },
    CatalogEntry {
        name: "torus_shear",
        kind: FamilyKind::TorusLoop,
        parameters: "amplitude: float",
        models: "torus",
        statement: "a non-isometric loop isotopic to the x_1 translation, with the same indices and flux",
    },
    CatalogEntry {
        name: "linear_contact_sphere_S",
        kind: FamilyKind::ContactForm,
        parameters: "",
        models: "s1xs2",
        statement: "the linear contact sphere e_0 a_0 + e_1 a_1 + e_2 a_2 on S^1 x S^2 has homogeneous index 1, \
                    hence infinite order in pi_2 of contact structures",
    },
    CatalogEntry {
        name: "delta_rotations",
        kind: FamilyKind::ContactForm,
        parameters: "",
        models: "s1xs2",
        statement: "pushing ker(z dtheta + x dy - y dx) by rotations of angle theta about a varying axis gives \
                    homogeneous index 0, so this sphere differs from linear_contact_sphere_S",
    },
    CatalogEntry {
        name: "alpha0_constant",
        kind: FamilyKind::ContactForm,
        parameters: "",
        models: "s1xs2",
        statement: "the constant sphere at the standard tight structure has homogeneous index 0",
    },
];

/// Builtin families with the statements they reproduce.
pub fn list_builtins() -> &'static [CatalogEntry] {
    CATALOG
}

pub fn is_builtin(name: &str) -> bool {
    CATALOG.iter().any(|e| e.name == name)
}
