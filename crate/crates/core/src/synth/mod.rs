//! Scene generation and sonification: additive note rendering, crossing
//! glides with a masking burst, noise dressing, and trace playback.

mod notes;
mod scene;
mod sonify;

pub use notes::{fugue_incipit, midi_to_hz, notes_from_json, render_notes, NoteEvent, Timbre};
pub use scene::{add_noise, crossing_glides, glide_frequencies, GlideSpec};
pub use sonify::sonify_trace;
