// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::io;
use std::path::Path;

use lissom_logic::closed_text;

use crate::obligation::Obligation;

/// One line per obligation: id, level, function, site, location.
pub fn obligations_tsv(obs: &[Obligation]) -> String {
    let mut out = String::from("id\tlevel\tfunction\tsite\tlocation\n");
    for o in obs {
        let p = &o.provenance;
        out.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", o.id, p.level, p.function, p.site, p.location));
    }
    out
}

/// Writes `<id>.fml` for every obligation and `obligations.tsv` into `dir`.
pub fn write_vcs(dir: &Path, obs: &[Obligation]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for o in obs {
        fs::write(dir.join(format!("{}.fml", o.id)), closed_text(&o.formula) + "\n")?;
    }
    fs::write(dir.join("obligations.tsv"), obligations_tsv(obs))
}
