//! Eye captures, segmentation label maps and label clean-up.

use std::path::Path;

use image::GrayImage;

use crate::error::{Error, Result};
use crate::region::Region;

/// Semantic class of a label-map pixel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Class {
    Background = 0,
    Sclera = 1,
    Iris = 2,
    Pupil = 3,
}

impl Class {
    pub fn from_u8(v: u8) -> Option<Class> {
        match v {
            0 => Some(Class::Background),
            1 => Some(Class::Sclera),
            2 => Some(Class::Iris),
            3 => Some(Class::Pupil),
            _ => None,
        }
    }
}

/// Per-pixel 4-class segmentation of one eye capture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    width: u32,
    height: u32,
    classes: Vec<Class>,
}

impl LabelMap {
    pub fn new(width: u32, height: u32, fill: Class) -> Self {
        Self {
            width,
            height,
            classes: vec![fill; width as usize * height as usize],
        }
    }

    /// Validate raw label bytes in row-major order.
    pub fn from_raw(width: u32, height: u32, raw: &[u8]) -> Result<Self> {
        assert_eq!(raw.len(), width as usize * height as usize, "raw buffer size");
        let mut classes = Vec::with_capacity(raw.len());
        for (i, &v) in raw.iter().enumerate() {
            match Class::from_u8(v) {
                Some(c) => classes.push(c),
                None => {
                    return Err(Error::IllegalLabelValue {
                        x: (i % width as usize) as u32,
                        y: (i / width as usize) as u32,
                        value: v,
                    })
                }
            }
        }
        Ok(Self { width, height, classes })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> Class) -> Self {
        let mut classes = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                classes.push(f(x, y));
            }
        }
        Self { width, height, classes }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Class {
        self.classes[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, class: Class) {
        self.classes[y as usize * self.width as usize + x as usize] = class;
    }

    pub fn count(&self, class: Class) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    pub fn region(&self, class: Class) -> Region {
        Region::from_fn(self.width as usize, self.height as usize, |x, y| {
            self.get(x as u32, y as u32) == class
        })
    }

    pub fn to_raw(&self) -> Vec<u8> {
        self.classes.iter().map(|&c| c as u8).collect()
    }

    pub fn to_image(&self) -> GrayImage {
        GrayImage::from_raw(self.width, self.height, self.to_raw()).expect("buffer size")
    }
}

/// One grayscale eye frame paired with its segmentation.
#[derive(Clone, Debug)]
pub struct EyeCapture {
    pub identity_id: String,
    pub frame_index: u64,
    pub image: GrayImage,
    pub labels: LabelMap,
}

impl EyeCapture {
    pub fn new(
        identity_id: impl Into<String>,
        frame_index: u64,
        image: GrayImage,
        labels: LabelMap,
    ) -> Result<Self> {
        if image.dimensions() != (labels.width(), labels.height()) {
            return Err(Error::DimensionMismatch {
                image_width: image.width(),
                image_height: image.height(),
                label_width: labels.width(),
                label_height: labels.height(),
            });
        }
        Ok(Self {
            identity_id: identity_id.into(),
            frame_index,
            image,
            labels,
        })
    }

    pub fn width(&self) -> u32 {
        self.image.width()
    }

    pub fn height(&self) -> u32 {
        self.image.height()
    }
}

fn open_gray(path: &Path) -> Result<GrayImage> {
    if !path.is_file() {
        return Err(Error::FileMissing(path.to_path_buf()));
    }
    Ok(image::open(path)?.into_luma8())
}

/// Load an eye image and its label PNG from disk.
pub fn load_capture(
    image_path: &Path,
    label_path: &Path,
    identity_id: &str,
    frame_index: u64,
) -> Result<EyeCapture> {
    let image = open_gray(image_path)?;
    let raw = open_gray(label_path)?;
    if image.dimensions() != raw.dimensions() {
        return Err(Error::DimensionMismatch {
            image_width: image.width(),
            image_height: image.height(),
            label_width: raw.width(),
            label_height: raw.height(),
        });
    }
    let labels = LabelMap::from_raw(raw.width(), raw.height(), raw.as_raw())?;
    EyeCapture::new(identity_id, frame_index, image, labels)
}

const MAX_REFINE_PASSES: usize = 8;

/// Keep the largest connected component of each foreground class and fill
/// its convex hull.
///
/// Hulls are nested: the iris hull is taken over iris pixels plus the
/// refined pupil, the sclera hull over sclera pixels plus the refined iris
/// and pupil. Painting order is sclera, iris, pupil so inner structures are
/// never overwritten. The pass is repeated until the map stops changing.
pub fn refine_labels(labels: &LabelMap) -> LabelMap {
    let mut current = refine_pass(labels);
    for _ in 1..MAX_REFINE_PASSES {
        let next = refine_pass(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn refine_pass(labels: &LabelMap) -> LabelMap {
    let (w, h) = (labels.width as usize, labels.height as usize);
    let hull_of = |src: &Region| src.largest_component().convex_fill();

    let pupil_src = labels.region(Class::Pupil);
    let pupil = if pupil_src.is_empty() {
        Region::empty(w, h)
    } else {
        hull_of(&pupil_src)
    };

    let iris_src = labels.region(Class::Iris);
    let iris = if iris_src.is_empty() {
        Region::empty(w, h)
    } else {
        hull_of(&iris_src.union(&pupil))
    };

    let sclera_src = labels.region(Class::Sclera);
    let sclera = if sclera_src.is_empty() {
        Region::empty(w, h)
    } else {
        hull_of(&sclera_src.union(&iris).union(&pupil))
    };

    let mut out = LabelMap::new(labels.width, labels.height, Class::Background);
    for (region, class) in [(&sclera, Class::Sclera), (&iris, Class::Iris), (&pupil, Class::Pupil)] {
        for (x, y) in region.pixels() {
            out.set(x as u32, y as u32, class);
        }
    }
    out
}
