mod common;

use common::*;

#[test]
fn running_example_emission() {
    let a = analyze_dir("fwm");
    assert_eq!(a.plans.len(), 1);
    let o = schema_xray::refactor::apply_plan(&a.code, &a.schema, &a.plans[0]).unwrap();
    assert_eq!(o.copy_statement, "COPY Movies::{title} TO Users::watchedMovies.movie_id WHERE movie_id = _id");
    golden("fwm.copy.txt", &format!("{}\n", o.copy_statement)).unwrap();
    golden("fwm.migration.js", &o.migration_script).unwrap();
    golden("fwm.rewritten.js", &changed_source(&o).1).unwrap();
}

#[test]
fn sequential_top_level_reference() {
    let a = analyze_dir("music");
    let o = apply_by(&a, "getAlbum", "Track");
    golden("music.getAlbum.migration.js", &o.migration_script).unwrap();
    golden("music.getAlbum.rewritten.js", &changed_source(&o).1).unwrap();
}

#[test]
fn aggregation_with_two_fields() {
    let a = analyze_dir("music");
    let o = apply_by(&a, "listTracksWithAlbumAndArtist", "Album");
    assert_eq!(o.copy_statement, "COPY Album::{title, releaseYear} TO Track::album_id WHERE album_id = _id");
    golden("music.album-into-track.migration.js", &o.migration_script).unwrap();
    golden("music.album-into-track.rewritten.js", &changed_source(&o).1).unwrap();
}

#[test]
fn reverse_lookup() {
    let a = analyze_dir("music");
    let o = apply_by(&a, "listAlbumsWithArtist", "Artist");
    golden("music.artist-into-album.migration.js", &o.migration_script).unwrap();
}

#[test]
fn music_plan_table() {
    let a = analyze_dir("music");
    golden("music.plans.txt", &schema_xray::refactor::plan_table(&a.plans)).unwrap();
}
