// COPY Track::{title} TO Album::songs WHERE songs = _id
db.album.find().forEach(function (doc) {
  doc.track_title = (doc.songs || []).map(function (id) {
    const ref = db.track.findOne({ _id: id });
    return ref ? ref.title : null;
  });
  db.album.replaceOne({ _id: doc._id }, doc);
});
