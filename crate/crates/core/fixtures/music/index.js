const MongoClient = require('mongodb').MongoClient;

const url = 'mongodb://localhost:27017/music';
const client = new MongoClient(url);
client.connect();

module.exports.client = client;
