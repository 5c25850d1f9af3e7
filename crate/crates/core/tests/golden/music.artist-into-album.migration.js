// COPY Artist::{name} TO Album::_id WHERE _id = albums
db.album.find().forEach(function (doc) {
  const ref = db.artist.findOne({ albums: doc._id });
  if (ref) { doc.artist_name = ref.name; }
  db.album.replaceOne({ _id: doc._id }, doc);
});
