const client = require('./index').client;
const dbName = 'music';

function listGenres(req, res) {
  client.db(dbName).collection('genre').find({}).toArray((error, results) => {
    res.json(results);
  });
}

function getGenre(req, res) {
  client.db(dbName).collection('genre').findOne({ _id: req.params.id }, (error, genre) => {
    res.json(genre);
  });
}

function createGenre(req, res) {
  const body = req.body;
  if (body.name == null) {
    res.status(400).json({ error: 'name is required' });
    return;
  }
  if (body.name == '') {
    res.status(400).json({ error: 'invalid name' });
    return;
  }
  client.db(dbName).collection('genre').insertOne({ name: body.name }, (error, info) => {
    res.json(info);
  });
}

function updateGenre(req, res) {
  const body = req.body;
  client.db(dbName).collection('genre').updateOne({ _id: req.params.id }, { $set: { name: body.name } }, (error, info) => {
    res.json(info);
  });
}

function deleteGenre(req, res) {
  client.db(dbName).collection('genre').deleteOne({ _id: req.params.id }, (error, info) => {
    res.json(info);
  });
}

module.exports.listGenres = listGenres;
module.exports.getGenre = getGenre;
module.exports.createGenre = createGenre;
module.exports.updateGenre = updateGenre;
module.exports.deleteGenre = deleteGenre;
