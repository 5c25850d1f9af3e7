const client = require('./index').client;
const dbName = 'music';

function listAlbums(req, res) {
  client.db(dbName).collection('album').find({}).toArray((error, results) => {
    res.json(results);
  });
}

function getAlbum(req, res) {
  client.db(dbName).collection('album').findOne({ _id: req.params.id }, (error, album) => {
    client.db(dbName).collection('track').findOne({ _id: album.songs[0] }, (error, track) => {
      console.log(album.title + ' ' + track.title);
    });
    res.json(album);
  });
}

function createAlbum(req, res) {
  const body = req.body;
  if (body.title == null) {
    res.status(400).json({ error: 'title is required' });
    return;
  }
  if (body.title == '') {
    res.status(400).json({ error: 'invalid title' });
    return;
  }
  if (body.releaseYear == null) {
    res.status(400).json({ error: 'releaseYear is required' });
    return;
  }
  if (body.releaseYear < 0) {
    res.status(400).json({ error: 'invalid releaseYear' });
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
  client.db(dbName).collection('album').insertOne({ title: body.title, releaseYear: body.releaseYear, songs: body.songs, categories: body.categories, rating: { score: body.rating.score, comment: body.rating.comment } }, (error, info) => {
    res.json(info);
  });
}

function updateAlbum(req, res) {
  const body = req.body;
  client.db(dbName).collection('album').updateOne({ _id: req.params.id }, { $set: { title: body.title, releaseYear: body.releaseYear }, $addToSet: { songs: { $each: body.songs }, categories: { $each: body.categories } } }, (error, info) => {
    res.json(info);
  });
}

function deleteAlbum(req, res) {
  client.db(dbName).collection('album').deleteOne({ _id: req.params.id }, (error, info) => {
    res.json(info);
  });
}

function listAlbumsWithArtist(req, res) {
  client.db(dbName).collection('album').aggregate([
    { $lookup: { from: 'artist', localField: '_id', foreignField: 'albums', as: 'artist' } },
    { $unwind: '$artist' }
  ]).toArray((error, albums) => {
    albums.forEach((a) => {
      console.log(a.title + ' ' + a.artist.name);
    });
    res.end();
  });
}

function listAlbumsWithGenres(req, res) {
  client.db(dbName).collection('album').aggregate([
    { $lookup: { from: 'genre', localField: 'categories', foreignField: '_id', as: 'genreDocs' } }
  ]).toArray((error, albums) => {
    albums.forEach((a) => {
      console.log(a.title + ' ' + a.genreDocs[0].name);
    });
    res.end();
  });
}

module.exports.listAlbums = listAlbums;
module.exports.getAlbum = getAlbum;
module.exports.createAlbum = createAlbum;
module.exports.updateAlbum = updateAlbum;
module.exports.deleteAlbum = deleteAlbum;
module.exports.listAlbumsWithArtist = listAlbumsWithArtist;
module.exports.listAlbumsWithGenres = listAlbumsWithGenres;
