//! Wavelength occupancy of the directed fibers and the commit/release
//! primitives every solver builds on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::route::Route;
use crate::topology::{DirectedLink, LightpathId, LinkId, Topology};
use crate::wavelength::{words_for, WavelengthSet};

impl From<[usize; 2]> for DirectedLink {
    fn from([from, to]: [usize; 2]) -> Self {
        Self::new(from, to)
    }
}

impl From<DirectedLink> for [usize; 2] {
    fn from(l: DirectedLink) -> Self {
        [l.from, l.to]
    }
}

/// A run of consecutive links carried on one wavelength.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(with = "link_pairs")]
    pub links: Vec<DirectedLink>,
    pub wavelength: usize,
}

mod link_pairs {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::topology::DirectedLink;

    pub fn serialize<S: Serializer>(links: &[DirectedLink], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[usize; 2]> = links.iter().map(|&l| l.into()).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<DirectedLink>, D::Error> {
        let pairs = Vec::<[usize; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(DirectedLink::from).collect())
    }
}

/// An established lightpath: its route and the wavelength used on each
/// converter-delimited segment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentedAssignment {
    #[serde(rename = "request")]
    pub lightpath: LightpathId,
    pub route: Route,
    pub segments: Vec<Segment>,
}

impl SegmentedAssignment {
    /// Splits `route` at its interior converters and assigns one wavelength
    /// per resulting segment.
    pub fn from_route(
        topology: &Topology,
        lightpath: LightpathId,
        route: Route,
        wavelengths: &[usize],
    ) -> Result<Self> {
        let spans = route.segment_spans(topology);
        if spans.len() != wavelengths.len() {
            return Err(Error::SegmentMismatch);
        }
        let links: Vec<DirectedLink> = route.links().collect();
        let segments = spans
            .into_iter()
            .zip(wavelengths)
            .map(|(span, &wavelength)| Segment {
                links: links[span].to_vec(),
                wavelength,
            })
            .collect();
        Ok(Self {
            lightpath,
            route,
            segments,
        })
    }

    /// Single-segment assignment on one wavelength.
    pub fn continuous(lightpath: LightpathId, route: Route, wavelength: usize) -> Self {
        let links = route.links().collect();
        Self {
            lightpath,
            route,
            segments: vec![Segment { links, wavelength }],
        }
    }

    /// Checks the assignment against `topology` and returns the
    /// `(link, wavelength)` slots it occupies in route order.
    pub fn slots(&self, topology: &Topology) -> Result<Vec<(LinkId, usize)>> {
        let link_ids = self.route.link_ids(topology)?;
        let route_links: Vec<DirectedLink> = self.route.links().collect();
        let mut slots = Vec::with_capacity(link_ids.len());
        let mut hop = 0;
        let mut previous_wavelength = None;
        for segment in &self.segments {
            if segment.links.is_empty() {
                return Err(Error::SegmentMismatch);
            }
            if segment.wavelength >= topology.wavelengths() {
                return Err(Error::WavelengthOutOfRange {
                    wavelength: segment.wavelength,
                    available: topology.wavelengths(),
                });
            }
            if hop > 0 {
                let boundary = route_links[hop].from;
                if !topology.is_converter(boundary) && previous_wavelength != Some(segment.wavelength) {
                    return Err(Error::SegmentationViolation(boundary));
                }
            }
            for &link in &segment.links {
                if route_links.get(hop) != Some(&link) {
                    return Err(Error::SegmentMismatch);
                }
                slots.push((link_ids[hop], segment.wavelength));
                hop += 1;
            }
            previous_wavelength = Some(segment.wavelength);
        }
        if hop != route_links.len() {
            return Err(Error::SegmentMismatch);
        }
        Ok(slots)
    }

    pub fn wavelengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.segments.iter().map(|s| s.wavelength)
    }
}

/// Occupancy map `(directed link, wavelength) -> lightpath`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkState {
    wavelengths: usize,
    words: usize,
    // `words` u64 per link; bit set = wavelength taken
    used: Vec<u64>,
    // `wavelengths` entries per link
    owner: Vec<Option<LightpathId>>,
}

impl NetworkState {
    pub fn new(topology: &Topology) -> Self {
        let wavelengths = topology.wavelengths();
        let words = words_for(wavelengths);
        Self {
            wavelengths,
            words,
            used: vec![0; words * topology.link_count()],
            owner: vec![None; wavelengths * topology.link_count()],
        }
    }

    pub fn wavelengths(&self) -> usize {
        self.wavelengths
    }

    /// Whether this state has the dimensions of `topology`.
    pub fn fits(&self, topology: &Topology) -> bool {
        self.wavelengths == topology.wavelengths()
            && self.owner.len() == self.wavelengths * topology.link_count()
    }

    pub fn owner(&self, link: LinkId, wavelength: usize) -> Option<LightpathId> {
        self.owner[link * self.wavelengths + wavelength]
    }

    pub fn is_free(&self, link: LinkId, wavelength: usize) -> bool {
        self.owner(link, wavelength).is_none()
    }

    pub fn is_empty(&self) -> bool {
        self.used.iter().all(|&w| w == 0)
    }

    /// Number of occupied `(link, wavelength)` slots.
    pub fn occupied_slots(&self) -> usize {
        self.used.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn used_words(&self, link: LinkId) -> &[u64] {
        &self.used[link * self.words..(link + 1) * self.words]
    }

    pub fn free_on_link(&self, link: LinkId) -> WavelengthSet {
        WavelengthSet::free_from_used(self.wavelengths, self.used_words(link))
    }

    /// Wavelengths free on every one of `links`.
    pub fn free_on_links(&self, links: &[LinkId]) -> WavelengthSet {
        let mut used = vec![0u64; self.words];
        for &link in links {
            for (acc, &w) in used.iter_mut().zip(self.used_words(link)) {
                *acc |= w;
            }
        }
        WavelengthSet::free_from_used(self.wavelengths, &used)
    }

    /// Free wavelengths of each converter-delimited segment of `route`. The
    /// route is feasible iff every returned set is nonempty.
    pub fn free_wavelengths_per_segment(
        &self,
        topology: &Topology,
        route: &Route,
    ) -> Result<Vec<WavelengthSet>> {
        let links = route.link_ids(topology)?;
        Ok(route
            .segment_spans(topology)
            .into_iter()
            .map(|span| self.free_on_links(&links[span]))
            .collect())
    }

    /// Occupies every slot of `assignment`, or nothing if any slot is taken
    /// or the segmentation is invalid. Lightpath ids are expected to be
    /// unique within a state; this is not checked.
    pub fn commit(&mut self, topology: &Topology, assignment: &SegmentedAssignment) -> Result<()> {
        let slots = assignment.slots(topology)?;
        self.commit_slots(topology, assignment.lightpath, &slots)
    }

    pub(crate) fn commit_slots(
        &mut self,
        topology: &Topology,
        lightpath: LightpathId,
        slots: &[(LinkId, usize)],
    ) -> Result<()> {
        for &(link, wavelength) in slots {
            if let Some(holder) = self.owner(link, wavelength) {
                let l = topology.link(link);
                return Err(Error::Conflict {
                    from: l.from,
                    to: l.to,
                    wavelength,
                    holder,
                });
            }
        }
        for &(link, wavelength) in slots {
            self.owner[link * self.wavelengths + wavelength] = Some(lightpath);
            self.used[link * self.words + wavelength / 64] |= 1 << (wavelength % 64);
        }
        Ok(())
    }

    pub(crate) fn clear_slots(&mut self, slots: &[(LinkId, usize)]) {
        for &(link, wavelength) in slots {
            self.owner[link * self.wavelengths + wavelength] = None;
            self.used[link * self.words + wavelength / 64] &= !(1 << (wavelength % 64));
        }
    }

    /// Frees every slot held by `lightpath`.
    pub fn release(&mut self, lightpath: LightpathId) -> Result<()> {
        let mut found = false;
        for (index, slot) in self.owner.iter_mut().enumerate() {
            if *slot == Some(lightpath) {
                *slot = None;
                let (link, wavelength) = (index / self.wavelengths, index % self.wavelengths);
                self.used[link * self.words + wavelength / 64] &= !(1 << (wavelength % 64));
                found = true;
            }
        }
        if found {
            Ok(())
        } else {
            Err(Error::UnknownLightpath(lightpath))
        }
    }
}
