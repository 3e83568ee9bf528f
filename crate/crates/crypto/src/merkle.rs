//! Binary Merkle tree over scalar digests. Odd levels duplicate their last
//! node.

use crate::hash::{crh_val, tag, HashParams, Tag};
use crate::curve::Scalar;
use crate::CryptoError;

pub const TAG_LEAF: Tag = tag("leaf");
pub const TAG_NODE: Tag = tag("node");

#[derive(Debug, Clone, PartialEq)]
pub struct MerkleTree {
    /// levels[0] are the hashed leaves, the last level holds the root.
    levels: Vec<Vec<Scalar>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MerklePath {
    pub siblings: Vec<Scalar>,
}

fn hash_leaf(pp: &HashParams, leaf: &Scalar) -> Scalar {
    crh_val(pp, &TAG_LEAF, std::slice::from_ref(leaf))
}

fn hash_node(pp: &HashParams, l: &Scalar, r: &Scalar) -> Scalar {
    crh_val(pp, &TAG_NODE, &[*l, *r])
}

impl MerkleTree {
    pub fn new(pp: &HashParams, leaves: &[Scalar]) -> Result<Self, CryptoError> {
        if leaves.is_empty() {
            return Err(CryptoError::Empty("merkle tree needs at least one leaf"));
        }
        let mut levels = vec![leaves.iter().map(|l| hash_leaf(pp, l)).collect::<Vec<_>>()];
        while levels.last().unwrap().len() > 1 {
            let cur = levels.last().unwrap();
            let next = cur
                .chunks(2)
                .map(|p| hash_node(pp, &p[0], p.get(1).unwrap_or(&p[0])))
                .collect();
            levels.push(next);
        }
        Ok(Self { levels })
    }

    pub fn root(&self) -> Scalar {
        self.levels.last().unwrap()[0]
    }

    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn len(&self) -> usize {
        self.levels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn prove(&self, index: usize) -> Result<MerklePath, CryptoError> {
        if index >= self.len() {
            return Err(CryptoError::IndexOutOfRange {
                index,
                len: self.len(),
            });
        }
        let mut i = index;
        let siblings = self.levels[..self.height()]
            .iter()
            .map(|level| {
                let s = i ^ 1;
                let sib = *level.get(s).unwrap_or(&level[i]);
                i /= 2;
                sib
            })
            .collect();
        Ok(MerklePath { siblings })
    }
}

pub fn merkle_root(pp: &HashParams, leaves: &[Scalar]) -> Result<Scalar, CryptoError> {
    Ok(MerkleTree::new(pp, leaves)?.root())
}

pub fn merkle_prove(pp: &HashParams, leaves: &[Scalar], index: usize) -> Result<MerklePath, CryptoError> {
    MerkleTree::new(pp, leaves)?.prove(index)
}

pub fn merkle_verify(pp: &HashParams, root: &Scalar, leaf: &Scalar, index: usize, path: &MerklePath) -> bool {
    if path.siblings.len() < usize::BITS as usize && index >> path.siblings.len() != 0 {
        return false;
    }
    let mut acc = hash_leaf(pp, leaf);
    let mut i = index;
    for s in &path.siblings {
        acc = if i & 1 == 0 {
            hash_node(pp, &acc, s)
        } else {
            hash_node(pp, s, &acc)
        };
        i >>= 1;
    }
    acc == *root
}
