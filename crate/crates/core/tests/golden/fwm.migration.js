// COPY Movies::{title} TO Users::watchedMovies.movie_id WHERE movie_id = _id
db.users.find().forEach(function (doc) {
  (doc.watchedMovies || []).forEach(function (item) {
    const ref = db.movies.findOne({ _id: item.movie_id });
    if (ref) { item.movie_title = ref.title; }
  });
  db.users.replaceOne({ _id: doc._id }, doc);
});
