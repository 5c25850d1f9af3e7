const client = require('./index').client;
const dbName = 'music';

function listArtists(req, res) {
  client.db(dbName).collection('artist').find({}).toArray((error, results) => {
    res.json(results);
  });
}

function getArtist(req, res) {
  client.db(dbName).collection('artist').findOne({ _id: req.params.id }, (error, artist) => {
    res.json(artist);
  });
}

function createArtist(req, res) {
  const body = req.body;
  if (body.name == null) {
    res.status(400).json({ error: 'name is required' });
    return;
  }
  if (body.name == '') {
    res.status(400).json({ error: 'invalid name' });
    return;
  }
  if (body.country == null) {
    res.status(400).json({ error: 'country is required' });
    return;
  }
  if (body.country == '') {
    res.status(400).json({ error: 'invalid country' });
    return;
  }
  client.db(dbName).collection('artist').insertOne({ name: body.name, country: body.country, albums: body.albums, tracks: body.tracks }, (error, info) => {
    res.json(info);
  });
}

function updateArtist(req, res) {
  const body = req.body;
  client.db(dbName).collection('artist').updateOne({ _id: req.params.id }, { $set: { name: body.name, country: body.country }, $addToSet: { albums: { $each: body.albums }, tracks: { $each: body.tracks } } }, (error, info) => {
    res.json(info);
  });
}

function deleteArtist(req, res) {
  client.db(dbName).collection('artist').deleteOne({ _id: req.params.id }, (error, info) => {
    res.json(info);
  });
}

function getArtistCatalog(req, res) {
  client.db(dbName).collection('artist').findOne({ name: req.params.name }, (error, artist) => {
    client.db(dbName).collection('album').findOne({ _id: artist.albums[0] }, (error, album) => {
      console.log(artist.name + ' ' + album.title);
    });
    client.db(dbName).collection('track').findOne({ _id: artist.tracks[0] }, (error, track) => {
      console.log(artist.name + ' ' + track.title);
    });
    res.json(artist);
  });
}

module.exports.listArtists = listArtists;
module.exports.getArtist = getArtist;
module.exports.createArtist = createArtist;
module.exports.updateArtist = updateArtist;
module.exports.deleteArtist = deleteArtist;
module.exports.getArtistCatalog = getArtistCatalog;
