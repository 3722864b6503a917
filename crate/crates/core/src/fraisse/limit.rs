use std::collections::VecDeque;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{enumerate_members, ClassError, FraisseClass};
use crate::structures::{
    automorphisms_with_cap, embeddings_where, extend_embedding, parse_structure, write_structure,
    Embedding, FinStructure,
};

/// An extension shape `A ⊆ B`: `A` is the substructure of `B` on `subset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub b: FinStructure,
    pub subset: Vec<usize>,
    pub a: FinStructure,
}

impl Template {
    /// Pairs of `B`-elements with their required images under `e`.
    fn partial(&self, e: &[usize]) -> Vec<(usize, usize)> {
        self.subset.iter().copied().zip(e.iter().copied()).collect()
    }
}

/// Every `A ⊊ B` with `B` a member of size `1..=cap` and `A` a closed
/// proper subset, one per orbit of `Aut(B)` on subsets.
pub fn extension_templates(class: &dyn FraisseClass, cap: usize) -> Result<Vec<Template>, ClassError> {
    let mut out = Vec::new();
    for n in 1..=cap {
        for b in enumerate_members(class, n)? {
            let aut = automorphisms_with_cap(&b, cap.max(1))?;
            let mut seen: Vec<Vec<usize>> = Vec::new();
            for mask in 0u32..(1 << n) - 1 {
                let subset: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                if !b.is_closed(&subset) || seen.contains(&subset) {
                    continue;
                }
                for p in aut.elements() {
                    let mut img: Vec<usize> = subset.iter().map(|&x| p.apply(x)).collect();
                    img.sort_unstable();
                    if !seen.contains(&img) {
                        seen.push(img);
                    }
                }
                let a = b.induced(&subset);
                if class.is_member(&a) {
                    out.push(Template {
                        b: b.clone(),
                        subset,
                        a,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaskStatus {
    Pending,
    /// Already realized in stage `stage` when the task came up.
    Found { stage: usize, map: Vec<usize> },
    /// Realized by amalgamating `B` onto the chain, producing stage `stage`.
    Built { stage: usize, map: Vec<usize> },
}

/// Extension demand: the embedding `embedding: A -> E_stage` must extend to
/// `B` for the template `template`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub id: usize,
    pub template: usize,
    pub stage: usize,
    pub embedding: Vec<usize>,
    pub status: TaskStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LimitParams {
    pub steps: usize,
    pub task_size_cap: usize,
    pub seed: Option<u64>,
}

/// Chain `E_0 ⊆ … ⊆ E_t`, stored as the top structure with `E_i` the
/// substructure on the first `sizes[i]` elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitApproximation {
    pub class: String,
    pub params: LimitParams,
    pub top: FinStructure,
    pub sizes: Vec<usize>,
    pub templates: Vec<Template>,
    pub tasks: Vec<Task>,
    /// Amalgamation steps actually taken; the queue may drain early.
    pub steps_taken: usize,
}

impl LimitApproximation {
    pub fn stage_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn stage(&self, i: usize) -> FinStructure {
        let elems: Vec<usize> = (0..self.sizes[i]).collect();
        self.top.induced(&elems)
    }

    pub fn pending(&self) -> usize {
        self.tasks
            .iter()
            .filter(|t| t.status == TaskStatus::Pending)
            .count()
    }

    pub fn manifest(&self) -> String {
        let mut out = String::new();
        let seed = self
            .params
            .seed
            .map_or_else(|| "none".to_string(), |s| s.to_string());
        writeln!(out, "class {}", self.class).unwrap();
        writeln!(out, "steps {}", self.params.steps).unwrap();
        writeln!(out, "cap {}", self.params.task_size_cap).unwrap();
        writeln!(out, "seed {seed}").unwrap();
        writeln!(out, "taken {}", self.steps_taken).unwrap();
        for (i, n) in self.sizes.iter().enumerate() {
            writeln!(out, "stage {i} size {n} file {}", stage_file(i)).unwrap();
        }
        out
    }

    /// One task per line in creation order.
    pub fn ledger(&self) -> String {
        let mut out = String::new();
        for t in &self.tasks {
            let (kind, at, map) = match &t.status {
                TaskStatus::Pending => ("pending", None, None),
                TaskStatus::Found { stage, map } => ("found", Some(*stage), Some(map)),
                TaskStatus::Built { stage, map } => ("built", Some(*stage), Some(map)),
            };
            write!(
                out,
                "task {} template {} stage {} e {} status {kind}",
                t.id,
                t.template,
                t.stage,
                join(&t.embedding)
            )
            .unwrap();
            if let (Some(at), Some(map)) = (at, map) {
                write!(out, " at {at} map {}", join(map)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Writes `manifest.txt`, `ledger.txt` and one `E_###.txt` per stage.
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("manifest.txt"), self.manifest())?;
        fs::write(dir.join("ledger.txt"), self.ledger())?;
        for i in 0..self.stage_count() {
            fs::write(dir.join(stage_file(i)), write_structure(&self.stage(i)))?;
        }
        Ok(())
    }

    /// Reloads a chain written by [`LimitApproximation::write_to`]; templates
    /// are recomputed from `class`.
    pub fn read_from(dir: &Path, class: &dyn FraisseClass) -> Result<Self, String> {
        let read = |name: &str| {
            fs::read_to_string(dir.join(name)).map_err(|e| format!("{name}: {e}"))
        };
        let manifest = read("manifest.txt")?;
        let mut name = None;
        let (mut steps, mut cap, mut seed, mut taken) = (0, 0, None, 0);
        let mut sizes = Vec::new();
        for line in manifest.lines() {
            let words: Vec<&str> = line.split_whitespace().collect();
            let num = |i: usize| -> Result<usize, String> {
                words
                    .get(i)
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| format!("manifest: bad line `{line}`"))
            };
            match words.first().copied() {
                Some("class") => name = words.get(1).map(|s| s.to_string()),
                Some("steps") => steps = num(1)?,
                Some("cap") => cap = num(1)?,
                Some("taken") => taken = num(1)?,
                Some("seed") => {
                    seed = match words.get(1) {
                        Some(&"none") => None,
                        Some(s) => Some(s.parse().map_err(|_| "manifest: bad seed".to_string())?),
                        None => return Err("manifest: bad seed".into()),
                    }
                }
                Some("stage") => sizes.push(num(3)?),
                Some(other) => return Err(format!("manifest: unknown directive `{other}`")),
                None => {}
            }
        }
        let name = name.ok_or("manifest: missing class")?;
        if name != class.name() {
            return Err(format!("manifest class {name} does not match {}", class.name()));
        }
        let last = sizes.len().checked_sub(1).ok_or("manifest: no stages")?;
        let top = parse_structure(&read(&stage_file(last))?).map_err(|e| e.to_string())?;
        let templates = extension_templates(class, cap).map_err(|e| e.to_string())?;
        let tasks = read("ledger.txt")?
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(parse_task)
            .collect::<Result<_, _>>()?;
        Ok(LimitApproximation {
            class: name,
            params: LimitParams {
                steps,
                task_size_cap: cap,
                seed,
            },
            top,
            sizes,
            templates,
            tasks,
            steps_taken: taken,
        })
    }
}

fn stage_file(i: usize) -> String {
    format!("E_{i:03}.txt")
}

fn join(xs: &[usize]) -> String {
    if xs.is_empty() {
        return "-".into();
    }
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn split(s: &str) -> Result<Vec<usize>, String> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.parse().map_err(|_| format!("ledger: bad list `{s}`")))
        .collect()
}

fn parse_task(line: &str) -> Result<Task, String> {
    let w: Vec<&str> = line.split_whitespace().collect();
    let bad = || format!("ledger: bad line `{line}`");
    let num = |i: usize| w.get(i).and_then(|s| s.parse().ok()).ok_or_else(bad);
    if w.len() < 10 || w[0] != "task" || w[2] != "template" || w[4] != "stage" || w[6] != "e" {
        return Err(bad());
    }
    let status = match w[9] {
        "pending" => TaskStatus::Pending,
        kind @ ("found" | "built") => {
            let at = num(11)?;
            let map = split(w.get(13).ok_or_else(bad)?)?;
            if kind == "found" {
                TaskStatus::Found { stage: at, map }
            } else {
                TaskStatus::Built { stage: at, map }
            }
        }
        _ => return Err(bad()),
    };
    Ok(Task {
        id: num(1)?,
        template: num(3)?,
        stage: num(5)?,
        embedding: split(w[7])?,
        status,
    })
}

/// Builds `E_0 = ∅ ⊆ E_1 ⊆ …` by FIFO dovetailing over extension tasks.
/// A task already realized in the current top is settled by lookup; the
/// first unrealized one costs a step and is settled by amalgamating `B` onto
/// the top over `A`.
pub fn build_limit(class: &dyn FraisseClass, params: LimitParams) -> Result<LimitApproximation, ClassError> {
    let templates = extension_templates(class, params.task_size_cap)?;
    let mut rng = params.seed.map(ChaCha8Rng::seed_from_u64);
    let mut top = class.empty();
    let mut sizes = vec![0];
    let mut tasks: Vec<Task> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    enqueue(&templates, &top, 0, 0, &mut tasks, &mut queue, rng.as_mut());
    let mut taken = 0;
    while taken < params.steps {
        let Some(id) = queue.pop_front() else { break };
        let stage = sizes.len() - 1;
        let tmpl = &templates[tasks[id].template];
        let partial = tmpl.partial(&tasks[id].embedding);
        if let Some(found) = extend_embedding(&tmpl.b, &top, &partial) {
            tasks[id].status = TaskStatus::Found {
                stage,
                map: found.into_map(),
            };
            continue;
        }
        let e = Embedding::new(tasks[id].embedding.clone());
        let inclusion = Embedding::new(tmpl.subset.clone());
        let am = class
            .amalgamate(&tmpl.a, &top, &tmpl.b, &e, &inclusion)
            .map_err(|err| ClassError::AmalgamationFailed {
                class: class.name(),
                reason: format!("task {id}: {err}"),
            })?;
        // Renumber W so the old top keeps its indices.
        let w = am.structure.size();
        let mut perm = vec![usize::MAX; w];
        for (x, &wx) in am.left.map().iter().enumerate() {
            perm[wx] = x;
        }
        let mut next = top.size();
        for slot in perm.iter_mut().filter(|p| **p == usize::MAX) {
            *slot = next;
            next += 1;
        }
        let old = top.size();
        top = am.structure.relabel(&perm);
        sizes.push(top.size());
        taken += 1;
        let map = am.right.map().iter().map(|&y| perm[y]).collect();
        tasks[id].status = TaskStatus::Built {
            stage: stage + 1,
            map,
        };
        enqueue(&templates, &top, old, stage + 1, &mut tasks, &mut queue, rng.as_mut());
    }
    Ok(LimitApproximation {
        class: class.name(),
        params,
        top,
        sizes,
        templates,
        tasks,
        steps_taken: taken,
    })
}

/// Queues every task whose embedding into `top` touches an element at
/// index `fresh_from` or later; at stage 0 this is the empty embedding.
fn enqueue(
    templates: &[Template],
    top: &FinStructure,
    fresh_from: usize,
    stage: usize,
    tasks: &mut Vec<Task>,
    queue: &mut VecDeque<usize>,
    rng: Option<&mut ChaCha8Rng>,
) {
    let mut batch = Vec::new();
    for (ti, t) in templates.iter().enumerate() {
        for e in embeddings_where(&t.a, top, false, &[], &|_, _| true, None) {
            let fresh = e.iter().any(|&x| x >= fresh_from);
            if fresh || (stage == 0 && e.is_empty()) {
                batch.push((ti, e));
            }
        }
    }
    if let Some(rng) = rng {
        batch.shuffle(rng);
    }
    for (template, embedding) in batch {
        queue.push_back(tasks.len());
        tasks.push(Task {
            id: tasks.len(),
            template,
            stage,
            embedding,
            status: TaskStatus::Pending,
        });
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingTask {
    pub stage: usize,
    pub template: usize,
    pub embedding: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub level: usize,
    pub certified: bool,
    /// Largest `j` such that every task into `E_j` with `|B| <= level` is
    /// realized in the top.
    pub prefix: Option<usize>,
    pub missing: Vec<MissingTask>,
    /// Ledger entries whose recorded map fails to extend the task.
    pub unsound: Vec<usize>,
}

fn unrealized(
    templates: &[Template],
    top: &FinStructure,
    stage: &FinStructure,
    stage_index: usize,
    level: usize,
    stop_at_first: bool,
) -> Vec<MissingTask> {
    let mut out = Vec::new();
    for (ti, t) in templates.iter().enumerate() {
        if t.b.size() > level {
            continue;
        }
        for e in embeddings_where(&t.a, stage, false, &[], &|_, _| true, None) {
            if extend_embedding(&t.b, top, &t.partial(&e)).is_none() {
                out.push(MissingTask {
                    stage: stage_index,
                    template: ti,
                    embedding: e,
                });
                if stop_at_first {
                    return out;
                }
            }
        }
    }
    out
}

/// Longest prefix `E_0..E_j` of the chain `top↾sizes[i]` whose tasks with
/// `|B| <= level` from `templates` are all realized in `top`; when even
/// `E_0` fails, its unrealized tasks. Each stage is a substructure of the
/// next, so qualifying stages form a prefix and bisection finds its end.
pub fn audit_extension(
    templates: &[Template],
    top: &FinStructure,
    sizes: &[usize],
    level: usize,
) -> (Option<usize>, Vec<MissingTask>) {
    let stage = |j: usize| top.induced(&(0..sizes[j]).collect::<Vec<_>>());
    let ok = |j: usize| unrealized(templates, top, &stage(j), j, level, true).is_empty();
    if sizes.is_empty() {
        return (None, Vec::new());
    }
    if !ok(0) {
        return (None, unrealized(templates, top, &stage(0), 0, level, false));
    }
    let (mut lo, mut hi) = (0, sizes.len() - 1);
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    (Some(lo), Vec::new())
}

fn ledger_sound(apx: &LimitApproximation, task: &Task) -> bool {
    let (stage, map) = match &task.status {
        TaskStatus::Pending => return true,
        TaskStatus::Found { stage, map } | TaskStatus::Built { stage, map } => (*stage, map),
    };
    let Some(t) = apx.templates.get(task.template) else {
        return false;
    };
    if stage < task.stage || stage >= apx.stage_count() {
        return false;
    }
    let extends = t
        .subset
        .iter()
        .zip(&task.embedding)
        .all(|(&b, &x)| map.get(b) == Some(&x));
    // E_stage is the induced prefix of the top, so embedding into it means
    // embedding into the top with image below its size.
    extends
        && map.iter().all(|&x| x < apx.sizes[stage])
        && Embedding::new(map.clone()).check(&t.b, &apx.top).is_ok()
}

/// Audits the chain at level `k`: finds the longest prefix `E_0..E_j` whose
/// `|B| <= k` tasks are all realized in the top, and replays every recorded
/// fulfilment. Certified iff `E_0` qualifies and the ledger is sound. Levels
/// above the task cap need templates the chain never stored, so they are
/// regenerated from `class`.
pub fn certify_extension_level(
    class: &dyn FraisseClass,
    apx: &LimitApproximation,
    k: usize,
) -> Result<Certificate, ClassError> {
    let unsound: Vec<usize> = apx
        .tasks
        .iter()
        .filter(|t| !ledger_sound(apx, t))
        .map(|t| t.id)
        .collect();
    let fresh;
    let templates = if k > apx.params.task_size_cap {
        fresh = extension_templates(class, k)?;
        &fresh
    } else {
        &apx.templates
    };
    let (prefix, missing) = audit_extension(templates, &apx.top, &apx.sizes, k);
    Ok(Certificate {
        level: k,
        certified: prefix.is_some() && unsound.is_empty(),
        prefix,
        missing,
        unsound,
    })
}
