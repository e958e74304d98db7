use crate::error::{Error, Result};

/// A named binary attribute `f: V -> {0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    name: String,
    members: Vec<bool>,
}

impl Attribute {
    pub fn new(name: impl Into<String>, members: Vec<bool>) -> Self {
        Attribute {
            name: name.into(),
            members,
        }
    }

    /// Attribute over `n` nodes holding exactly the listed indices.
    ///
    /// Panics if an index is `>= n`.
    pub fn from_indices(name: impl Into<String>, n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut members = vec![false; n];
        for i in indices {
            assert!(i < n, "attribute member {i} out of range for {n} nodes");
            members[i] = true;
        }
        Attribute::new(name, members)
    }

    pub fn constant(name: impl Into<String>, n: usize, value: bool) -> Self {
        Attribute::new(name, vec![value; n])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn node_count(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn has(&self, v: usize) -> bool {
        self.members[v]
    }

    /// `f(v)` as a float.
    #[inline]
    pub fn value(&self, v: usize) -> f64 {
        if self.members[v] {
            1.0
        } else {
            0.0
        }
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn holders(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i)
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    /// Fraction of nodes holding the attribute.
    pub fn prevalence(&self) -> f64 {
        self.count() as f64 / self.members.len() as f64
    }
}

/// Named attributes over a common node set, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttributeSet {
    node_count: usize,
    attributes: Vec<Attribute>,
}

impl AttributeSet {
    pub fn new(node_count: usize) -> Self {
        AttributeSet {
            node_count,
            attributes: Vec::new(),
        }
    }

    /// Adds or replaces an attribute with the same name.
    ///
    /// Panics if the attribute is over a different node count.
    pub fn insert(&mut self, attribute: Attribute) {
        assert_eq!(attribute.node_count(), self.node_count, "attribute size mismatch");
        match self.attributes.iter_mut().find(|a| a.name == attribute.name) {
            Some(slot) => *slot = attribute,
            None => self.attributes.push(attribute),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&Attribute> {
        self.get(name).ok_or_else(|| Error::UnknownAttribute(name.to_owned()))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Attribute> {
        self.attributes.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.attributes.iter().map(|a| a.name.as_str())
    }

    /// Restricts every attribute to the nodes with `keep[v]`, matching
    /// [`DirectedGraph::induced`](super::DirectedGraph::induced).
    pub fn restrict(&self, keep: &[bool]) -> AttributeSet {
        let node_count = keep.iter().filter(|&&k| k).count();
        let attributes = self
            .attributes
            .iter()
            .map(|a| {
                let members = a
                    .members
                    .iter()
                    .zip(keep)
                    .filter(|(_, &k)| k)
                    .map(|(&m, _)| m)
                    .collect();
                Attribute::new(a.name.clone(), members)
            })
            .collect();
        AttributeSet { node_count, attributes }
    }
}

impl<'a> IntoIterator for &'a AttributeSet {
    type Item = &'a Attribute;
    type IntoIter = std::slice::Iter<'a, Attribute>;

    fn into_iter(self) -> Self::IntoIter {
        self.attributes.iter()
    }
}

/// What to do with attribute lines naming nodes absent from the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnknownNodePolicy {
    #[default]
    Error,
    Skip,
}

#[derive(Debug, Clone)]
pub struct LoadedAttributes {
    pub attributes: AttributeSet,
    pub skipped_unknown: usize,
}
