const client = require('./db').client;
const dbName = 'legacy';

class Cache {
  constructor() {
    this.items = [];
  }
}

function load(id) {
  client.db(dbName).collection('accounts').findOne({ _id: id }, (err, account) => {
    console.log(account.owner);
  });
}
