const client = require('./index').client;
const dbName = 'music';

function listTracks(req, res) {
  client.db(dbName).collection('track').find({}).toArray((error, results) => {
    res.json(results);
  });
}

function getTrack(req, res) {
  client.db(dbName).collection('track').findOne({ _id: req.params.id }, (error, track) => {
    res.json(track);
  });
}

function createTrack(req, res) {
  const body = req.body;
  if (body.title == null) {
    res.status(400).json({ error: 'title is required' });
    return;
  }
  if (body.title == '') {
    res.status(400).json({ error: 'invalid title' });
    return;
  }
  if (body.duration == null) {
    res.status(400).json({ error: 'duration is required' });
    return;
  }
  if (body.duration < 0) {
    res.status(400).json({ error: 'invalid duration' });
    return;
  }
  if (body.rating != null) {
    if (body.rating.score < 0) {
      res.status(400).json({ error: 'invalid rating.score' });
      return;
    }
    if (body.rating.comment == '') {
      res.status(400).json({ error: 'invalid rating.comment' });
      return;
    }
  }
  client.db(dbName).collection('track').insertOne({ title: body.title, duration: body.duration, album_id: body.album_id, genres: body.genres, rating: { score: body.rating.score, comment: body.rating.comment } }, (error, info) => {
    res.json(info);
  });
}

function updateTrack(req, res) {
  const body = req.body;
  client.db(dbName).collection('track').updateOne({ _id: req.params.id }, { $set: { title: body.title, duration: body.duration, album_id: body.album_id }, $addToSet: { genres: { $each: body.genres } } }, (error, info) => {
    res.json(info);
  });
}

function deleteTrack(req, res) {
  client.db(dbName).collection('track').deleteOne({ _id: req.params.id }, (error, info) => {
    res.json(info);
  });
}

function listTracksWithAlbumAndArtist(req, res) {
  client.db(dbName).collection('track').aggregate([
    { $lookup: { from: 'album', localField: 'album_id', foreignField: '_id', as: 'album' } },
    { $unwind: '$album' },
    { $lookup: { from: 'artist', localField: '_id', foreignField: 'tracks', as: 'artist' } },
    { $unwind: '$artist' }
  ]).toArray((error, tracks) => {
    tracks.forEach((t) => {
      console.log(t.title + ' ' + t.album.title + ' ' + t.album.releaseYear + ' ' + t.artist.name);
    });
    res.end();
  });
}

function listTracksWithGenres(req, res) {
  client.db(dbName).collection('track').aggregate([
    { $lookup: { from: 'genre', localField: 'genres', foreignField: '_id', as: 'genreDocs' } }
  ]).toArray((error, tracks) => {
    tracks.forEach((t) => {
      console.log(t.title + ' ' + t.genreDocs[0].name);
    });
    res.end();
  });
}

module.exports.listTracks = listTracks;
module.exports.getTrack = getTrack;
module.exports.createTrack = createTrack;
module.exports.updateTrack = updateTrack;
module.exports.deleteTrack = deleteTrack;
module.exports.listTracksWithAlbumAndArtist = listTracksWithAlbumAndArtist;
module.exports.listTracksWithGenres = listTracksWithGenres;
